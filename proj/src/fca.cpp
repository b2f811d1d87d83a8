#include "qdensity/fca.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>

namespace qdensity::fca {

namespace {

using Mask = std::uint32_t;

Subset to_subset(Mask m, std::size_t n) {
    Subset s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = (m >> i) & 1U;
    return s;
}

Mask to_mask(const Subset& s) {
    Mask m = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i]) m |= Mask{1} << i;
    }
    return m;
}

std::size_t count(const Subset& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), true)); }

double cosine_with_support(const std::vector<double>& v, const Subset& support) {
    const std::size_t k = count(support);
    if (k == 0) return 0.0;
    double dot = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        norm += v[i] * v[i];
        if (support[i]) dot += std::abs(v[i]);
    }
    return dot / (std::sqrt(norm) * std::sqrt(static_cast<double>(k)));
}

}  // namespace

Relation::Relation(Alphabet x, Alphabet y, std::vector<bool> incidence)
    : x_(std::move(x)), y_(std::move(y)), incidence_(std::move(incidence)) {
    if (incidence_.size() != x_.size() * y_.size()) {
        throw linalg::DimensionError("Relation: incidence table does not match alphabets");
    }
}

Relation Relation::from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs) {
    if (pairs.empty()) throw std::invalid_argument("relation has no pairs");
    std::vector<std::string> xs, ys;
    for (const auto& [x, y] : pairs) {
        if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
        if (std::find(ys.begin(), ys.end(), y) == ys.end()) ys.push_back(y);
    }
    Alphabet xa(xs), ya(ys);
    std::vector<bool> inc(xs.size() * ys.size(), false);
    for (const auto& [x, y] : pairs) {
        const std::size_t k = *xa.index_of(x) * ys.size() + *ya.index_of(y);
        if (inc[k]) throw std::invalid_argument("duplicate pair (" + x + ", " + y + ")");
        inc[k] = true;
    }
    return Relation(std::move(xa), std::move(ya), std::move(inc));
}

std::size_t Relation::edge_count() const {
    return static_cast<std::size_t>(std::count(incidence_.begin(), incidence_.end(), true));
}

Subset galois_f(const Relation& r, const Subset& a) {
    if (a.size() != r.x_alphabet().size()) throw linalg::DimensionError("galois_f: subset size mismatch");
    Subset out(r.y_alphabet().size(), true);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (std::size_t y = 0; y < out.size(); ++y) out[y] = out[y] && r.related(i, y);
    }
    return out;
}

Subset galois_g(const Relation& r, const Subset& b) {
    if (b.size() != r.y_alphabet().size()) throw linalg::DimensionError("galois_g: subset size mismatch");
    Subset out(r.x_alphabet().size(), true);
    for (std::size_t y = 0; y < b.size(); ++y) {
        if (!b[y]) continue;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] && r.related(i, y);
    }
    return out;
}

std::vector<FormalConcept> formal_concepts(const Relation& r) {
    const std::size_t nx = r.x_alphabet().size();
    const std::size_t ny = r.y_alphabet().size();
    if (nx > kMaxSide || ny > kMaxSide) {
        throw std::invalid_argument("formal_concepts: sides are limited to " + std::to_string(kMaxSide) + " elements");
    }
    std::set<Mask> extents;
    std::vector<FormalConcept> out;
    auto record = [&](Subset extent, Subset intent) {
        if (extents.insert(to_mask(extent)).second) out.push_back({std::move(extent), std::move(intent)});
    };
    if (ny <= nx) {
        for (Mask b = 0; b < (Mask{1} << ny); ++b) {
            Subset extent = galois_g(r, to_subset(b, ny));
            Subset intent = galois_f(r, extent);
            record(std::move(extent), std::move(intent));
        }
    } else {
        for (Mask a = 0; a < (Mask{1} << nx); ++a) {
            Subset intent = galois_f(r, to_subset(a, nx));
            Subset extent = galois_g(r, intent);
            record(std::move(extent), std::move(intent));
        }
    }
    auto indices = [](const Subset& s) {
        std::vector<std::size_t> v;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i]) v.push_back(i);
        }
        return v;
    };
    std::sort(out.begin(), out.end(), [&](const FormalConcept& p, const FormalConcept& q) {
        const std::size_t cp = count(p.extent), cq = count(q.extent);
        if (cp != cq) return cp > cq;
        return indices(p.extent) < indices(q.extent);
    });
    return out;
}

std::vector<FormalConcept> proper_concepts(const Relation& r) {
    std::vector<FormalConcept> out;
    for (auto& c : formal_concepts(r)) {
        if (count(c.extent) > 0 && count(c.intent) > 0) out.push_back(std::move(c));
    }
    return out;
}

bool is_subset(const Subset& a, const Subset& b) {
    if (a.size() != b.size()) throw linalg::DimensionError("is_subset: size mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] && !b[i]) return false;
    }
    return true;
}

std::vector<std::string> members(const Subset& s, const Alphabet& alphabet) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i]) out.push_back(alphabet.symbol(i));
    }
    return out;
}

EigenConceptReport compare_eigen_concepts(const Relation& r) {
    const std::size_t nx = r.x_alphabet().size();
    const std::size_t ny = r.y_alphabet().size();
    const std::size_t edges = r.edge_count();
    if (edges == 0) throw std::invalid_argument("compare_eigen_concepts: relation is empty");

    std::vector<double> probs(nx * ny, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t a = 0; a < ny; ++a) {
            if (r.related(i, a)) probs[i * ny + a] = 1.0 / static_cast<double>(edges);
        }
    }
    const SchmidtData sd = schmidt(build_state(JointDistribution(r.x_alphabet(), r.y_alphabet(), std::move(probs))));

    EigenConceptReport report;
    report.concepts = proper_concepts(r);
    std::vector<bool> concept_hit(report.concepts.size(), false);
    std::set<int> distinct;
    for (std::size_t k = 0; k < sd.coefficients.size(); ++k) {
        const double lambda = sd.coefficients[k] * sd.coefficients[k];
        if (lambda <= 1e-12) continue;
        EigenMatch m{lambda, sd.x_vectors.column(k), sd.y_vectors.column(k), -1, 0.0, 0.0, false};
        double best = -1.0;
        for (std::size_t c = 0; c < report.concepts.size(); ++c) {
            const double ce = cosine_with_support(m.x_vector, report.concepts[c].extent);
            const double ci = cosine_with_support(m.y_vector, report.concepts[c].intent);
            if (ce * ci > best + 1e-12) {
                best = ce * ci;
                m.concept_index = static_cast<int>(c);
                m.extent_cosine = ce;
                m.intent_cosine = ci;
            }
        }
        m.exact = m.concept_index >= 0 && m.extent_cosine >= 1.0 - kCosineTolerance &&
                  m.intent_cosine >= 1.0 - kCosineTolerance;
        if (m.exact) {
            ++report.matched;
            concept_hit[static_cast<std::size_t>(m.concept_index)] = true;
            distinct.insert(m.concept_index);
        } else {
            ++report.unmatched_eigenpairs;
        }
        report.eigenpairs.push_back(std::move(m));
    }
    report.unmatched_concepts =
        static_cast<std::size_t>(std::count(concept_hit.begin(), concept_hit.end(), false));
    report.coincide = report.unmatched_eigenpairs == 0 && report.unmatched_concepts == 0 &&
                      distinct.size() == report.matched;
    return report;
}

}  // namespace qdensity::fca
