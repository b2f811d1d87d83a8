#include "qdensity/mps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>

namespace qdensity::mps {

namespace {

Tensor3 identity_tensor(std::size_t d) {
    Tensor3 t(1, d, d);
    for (std::size_t s = 0; s < d; ++s) t(0, s, s) = 1.0;
    return t;
}

void check_sequence(const MatrixProductState& m, std::span<const std::size_t> s) {
    if (s.size() != m.n()) {
        throw std::invalid_argument("sequence length " + std::to_string(s.size()) + " does not match model length " +
                                    std::to_string(m.n()));
    }
    for (std::size_t x : s) {
        if (x >= m.physical_dim()) throw std::invalid_argument("sequence symbol outside the physical dimension");
    }
}

// L'[r] = Σ_l L[l]·T(l, s, r)
std::vector<double> step_left(const std::vector<double>& left, const Tensor3& t, std::size_t s) {
    std::vector<double> out(t.right, 0.0);
    for (std::size_t l = 0; l < t.left; ++l) {
        const double x = left[l];
        if (x == 0.0) continue;
        for (std::size_t r = 0; r < t.right; ++r) out[r] += x * t(l, s, r);
    }
    return out;
}

}  // namespace

MatrixProductState::MatrixProductState(std::size_t physical_dim, std::vector<Tensor3> tensors)
    : d_(physical_dim), tensors_(std::move(tensors)) {
    if (d_ == 0) throw std::invalid_argument("MPS: physical dimension must be positive");
    if (tensors_.empty()) throw std::invalid_argument("MPS: no tensors");
    for (std::size_t k = 0; k < tensors_.size(); ++k) {
        const Tensor3& t = tensors_[k];
        if (t.phys != d_) throw std::invalid_argument("MPS: tensor " + std::to_string(k) + " has wrong physical dim");
        if (t.left == 0 || t.right == 0 || t.data.size() != t.left * t.phys * t.right) {
            throw std::invalid_argument("MPS: tensor " + std::to_string(k) + " has inconsistent shape");
        }
        if (k == 0 && t.left != 1) throw std::invalid_argument("MPS: first left bond must be 1");
        if (k > 0 && tensors_[k - 1].right != t.left) {
            throw std::invalid_argument("MPS: bond mismatch between tensors " + std::to_string(k - 1) + " and " +
                                        std::to_string(k));
        }
        for (double x : t.data) {
            if (!std::isfinite(x)) throw std::invalid_argument("MPS: non-finite entry");
        }
    }
    if (tensors_.back().right != 1) throw std::invalid_argument("MPS: last right bond must be 1");
}

std::vector<std::size_t> MatrixProductState::bond_dims() const {
    std::vector<std::size_t> out;
    out.reserve(tensors_.size());
    for (const auto& t : tensors_) out.push_back(t.right);
    return out;
}

MatrixProductState train(const SequenceDataset& ds, const TrainConfig& cfg, TrainTrace* trace) {
    const std::size_t n = ds.length();
    const std::size_t d = ds.alphabet().size();
    if (ds.size() == 0) throw std::invalid_argument("train: dataset is empty");
    if (n < 2) throw std::invalid_argument("train: sequences need length >= 2");
    if (cfg.chi < 1) throw std::invalid_argument("train: chi must be >= 1");

    std::map<Sequence, std::size_t> counts;
    for (const auto& s : ds.samples()) ++counts[s];
    std::vector<Sequence> seqs;
    std::vector<double> weight;
    for (const auto& [s, c] : counts) {
        seqs.push_back(s);
        weight.push_back(std::sqrt(static_cast<double>(c)));
    }
    const std::size_t u = seqs.size();

    // Bond-space image of each distinct sample's processed prefix.
    std::vector<std::vector<double>> v(u, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < u; ++i) v[i][seqs[i][0]] = 1.0;

    std::vector<Tensor3> tensors;
    tensors.push_back(identity_tensor(d));
    std::size_t bond = d;

    for (std::size_t site = 1; site + 1 < n; ++site) {
        // Samples agreeing on the untouched suffix add coherently.
        std::map<Sequence, std::size_t> group_of;
        std::vector<std::size_t> group(u);
        for (std::size_t i = 0; i < u; ++i) {
            Sequence key(seqs[i].begin() + static_cast<std::ptrdiff_t>(site + 1), seqs[i].end());
            group[i] = group_of.emplace(std::move(key), group_of.size()).first->second;
        }
        const std::size_t dim = bond * d;
        Matrix gm(dim, group_of.size());
        for (std::size_t i = 0; i < u; ++i) {
            const std::size_t s = seqs[i][site];
            for (std::size_t a = 0; a < bond; ++a) gm(a * d + s, group[i]) += weight[i] * v[i][a];
        }
        Matrix rho = linalg::cogram(gm);
        const double tr = rho.trace();
        if (!(tr > 0.0)) throw std::runtime_error("train: reduced density vanished at site " + std::to_string(site));
        rho *= 1.0 / tr;
        linalg::SymEigen eig = linalg::sym_eigen(rho);

        const std::size_t keep = std::min(cfg.chi, dim);
        Tensor3 t(bond, d, keep);
        for (std::size_t a = 0; a < bond; ++a) {
            for (std::size_t s = 0; s < d; ++s) {
                for (std::size_t w = 0; w < keep; ++w) t(a, s, w) = eig.eigenvectors(a * d + s, w);
            }
        }
        for (std::size_t i = 0; i < u; ++i) v[i] = step_left(v[i], t, seqs[i][site]);

        if (trace != nullptr) trace->steps.push_back({site, std::move(rho), std::move(eig.eigenvalues), std::move(gm)});
        tensors.push_back(std::move(t));
        bond = keep;
    }

    Tensor3 last(bond, d, 1);
    for (std::size_t i = 0; i < u; ++i) {
        for (std::size_t a = 0; a < bond; ++a) last(a, seqs[i][n - 1], 0) += weight[i] * v[i][a];
    }
    double norm = 0.0;
    for (double x : last.data) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw std::runtime_error("train: final tensor vanished");
    for (double& x : last.data) x /= norm;
    tensors.push_back(std::move(last));
    return MatrixProductState(d, std::move(tensors));
}

double amplitude(const MatrixProductState& m, std::span<const std::size_t> s) {
    check_sequence(m, s);
    std::vector<double> left{1.0};
    for (std::size_t k = 0; k < m.n(); ++k) left = step_left(left, m.tensors()[k], s[k]);
    return left[0];
}

double born_probability(const MatrixProductState& m, std::span<const std::size_t> s) {
    const double a = amplitude(m, s);
    return a * a;
}

MatrixProductState parity_target(std::size_t n) {
    if (n < 2) throw std::invalid_argument("parity_target: n must be >= 2");
    const double h = 1.0 / std::sqrt(2.0);
    std::vector<Tensor3> tensors;
    tensors.push_back(identity_tensor(2));
    for (std::size_t k = 1; k + 1 < n; ++k) {
        Tensor3 t(2, 2, 2);
        for (std::size_t l = 0; l < 2; ++l) {
            for (std::size_t s = 0; s < 2; ++s) t(l, s, l ^ s) = h;
        }
        tensors.push_back(std::move(t));
    }
    Tensor3 last(2, 2, 1);
    last(0, 0, 0) = h;
    last(1, 1, 0) = h;
    tensors.push_back(std::move(last));
    return MatrixProductState(2, std::move(tensors));
}

double inner_product(const MatrixProductState& a, const MatrixProductState& b) {
    if (a.n() != b.n() || a.physical_dim() != b.physical_dim()) {
        throw std::invalid_argument("inner_product: models have different shapes");
    }
    Matrix env(1, 1);
    env(0, 0) = 1.0;
    for (std::size_t k = 0; k < a.n(); ++k) {
        const Tensor3& ta = a.tensors()[k];
        const Tensor3& tb = b.tensors()[k];
        Matrix next(ta.right, tb.right);
        Matrix tmp(ta.left, tb.right);
        for (std::size_t s = 0; s < a.physical_dim(); ++s) {
            // tmp(l, r') = Σ_l' env(l, l')·B(l', s, r')
            for (std::size_t l = 0; l < ta.left; ++l) {
                for (std::size_t r2 = 0; r2 < tb.right; ++r2) {
                    double acc = 0.0;
                    for (std::size_t l2 = 0; l2 < tb.left; ++l2) acc += env(l, l2) * tb(l2, s, r2);
                    tmp(l, r2) = acc;
                }
            }
            for (std::size_t l = 0; l < ta.left; ++l) {
                for (std::size_t r = 0; r < ta.right; ++r) {
                    const double x = ta(l, s, r);
                    if (x == 0.0) continue;
                    for (std::size_t r2 = 0; r2 < tb.right; ++r2) next(r, r2) += x * tmp(l, r2);
                }
            }
        }
        env = std::move(next);
    }
    return env(0, 0);
}

double bhattacharyya(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("bhattacharyya: distributions differ in size");
    return bhattacharyya(p.size(), [&](std::size_t i) { return p[i]; }, [&](std::size_t i) { return q[i]; });
}

double bhattacharyya(const MatrixProductState& a, const MatrixProductState& b) {
    const double overlap = inner_product(a, b);
    if (!(overlap > 0.0)) return kInfiniteDistance;
    // Overlaps a rounding error above 1 would give a tiny negative distance.
    return std::max(0.0, -std::log(overlap));
}

double uniform_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t x = rng();
        if (x >= threshold) return x % bound;
    }
}

std::vector<Sequence> sample(const MatrixProductState& m, std::size_t count, std::uint64_t seed) {
    const std::size_t n = m.n();
    const std::size_t d = m.physical_dim();
    // env[k]: contraction of sites k..n−1 with themselves, over the left bond of site k.
    std::vector<Matrix> env(n + 1);
    env[n] = Matrix(1, 1);
    env[n](0, 0) = 1.0;
    for (std::size_t k = n; k-- > 0;) {
        const Tensor3& t = m.tensors()[k];
        Matrix e(t.left, t.left);
        for (std::size_t s = 0; s < d; ++s) {
            for (std::size_t l = 0; l < t.left; ++l) {
                std::vector<double> row(t.right, 0.0);
                for (std::size_t r = 0; r < t.right; ++r) {
                    for (std::size_t r2 = 0; r2 < t.right; ++r2) row[r2] += t(l, s, r) * env[k + 1](r, r2);
                }
                for (std::size_t l2 = 0; l2 < t.left; ++l2) {
                    double acc = 0.0;
                    for (std::size_t r2 = 0; r2 < t.right; ++r2) acc += row[r2] * t(l2, s, r2);
                    e(l, l2) += acc;
                }
            }
        }
        env[k] = std::move(e);
    }

    std::mt19937_64 rng(seed);
    std::vector<Sequence> out;
    out.reserve(count);
    std::vector<double> probs(d);
    for (std::size_t c = 0; c < count; ++c) {
        Sequence s(n);
        std::vector<double> left{1.0};
        for (std::size_t k = 0; k < n; ++k) {
            const Matrix& r = env[k + 1];
            std::vector<std::vector<double>> cand(d);
            double total = 0.0;
            for (std::size_t x = 0; x < d; ++x) {
                cand[x] = step_left(left, m.tensors()[k], x);
                const auto rv = r * std::span<const double>(cand[x]);
                double p = 0.0;
                for (std::size_t i = 0; i < rv.size(); ++i) p += cand[x][i] * rv[i];
                probs[x] = std::max(0.0, p);
                total += probs[x];
            }
            if (!(total > 0.0)) throw std::runtime_error("sample: model has zero norm");
            const double target = uniform_unit(rng) * total;
            std::size_t pick = d - 1;
            double acc = 0.0;
            for (std::size_t x = 0; x < d; ++x) {
                acc += probs[x];
                if (target < acc && probs[x] > 0.0) {
                    pick = x;
                    break;
                }
            }
            while (probs[pick] == 0.0 && pick > 0) --pick;
            s[k] = pick;
            const double scale = 1.0 / std::sqrt(probs[pick]);
            left = std::move(cand[pick]);
            for (double& x : left) x *= scale;
        }
        out.push_back(std::move(s));
    }
    return out;
}

MatrixProductState random_isometric(std::size_t n, std::size_t chi, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("random_isometric: n must be >= 2");
    if (chi < 1) throw std::invalid_argument("random_isometric: chi must be >= 1");
    const std::size_t d = 2;
    std::mt19937_64 rng(seed);
    auto draw = [&] { return 2.0 * uniform_unit(rng) - 1.0; };

    std::vector<Tensor3> tensors;
    tensors.push_back(identity_tensor(d));
    std::size_t bond = d;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const std::size_t dim = bond * d;
        const std::size_t keep = std::min(chi, dim);
        Matrix q(dim, keep);
        for (std::size_t w = 0; w < keep; ++w) {
            std::vector<double> col;
            double norm = 0.0;
            // Redraw until the column survives orthogonalization.
            while (norm < 1e-6) {
                col.assign(dim, 0.0);
                for (double& x : col) x = draw();
                for (int pass = 0; pass < 2; ++pass) {
                    for (std::size_t p = 0; p < w; ++p) {
                        double dot = 0.0;
                        for (std::size_t i = 0; i < dim; ++i) dot += col[i] * q(i, p);
                        for (std::size_t i = 0; i < dim; ++i) col[i] -= dot * q(i, p);
                    }
                }
                norm = 0.0;
                for (double x : col) norm += x * x;
                norm = std::sqrt(norm);
            }
            for (std::size_t i = 0; i < dim; ++i) q(i, w) = col[i] / norm;
        }
        Tensor3 t(bond, d, keep);
        for (std::size_t a = 0; a < bond; ++a) {
            for (std::size_t s = 0; s < d; ++s) {
                for (std::size_t w = 0; w < keep; ++w) t(a, s, w) = q(a * d + s, w);
            }
        }
        tensors.push_back(std::move(t));
        bond = keep;
    }
    Tensor3 last(bond, d, 1);
    double norm = 0.0;
    while (norm < 1e-6) {
        norm = 0.0;
        for (double& x : last.data) {
            x = draw();
            norm += x * x;
        }
        norm = std::sqrt(norm);
    }
    for (double& x : last.data) x /= norm;
    tensors.push_back(std::move(last));
    return MatrixProductState(d, std::move(tensors));
}

std::vector<Sequence> draw_even_strings(std::size_t n, std::size_t count, std::uint64_t seed) {
    if (n < 2 || n > 24) throw std::invalid_argument("draw_even_strings: n must be in [2, 24]");
    const std::uint64_t space = std::uint64_t{1} << (n - 1);
    if (count < 1 || count > space) {
        throw std::invalid_argument("draw_even_strings: cannot draw " + std::to_string(count) + " of " +
                                    std::to_string(space) + " strings");
    }
    // Floyd's algorithm: `count` distinct indices, uniform over subsets.
    std::mt19937_64 rng(seed);
    std::set<std::uint64_t> chosen;
    for (std::uint64_t j = space - count; j < space; ++j) {
        const std::uint64_t t = uniform_below(rng, j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<Sequence> out;
    out.reserve(count);
    for (std::uint64_t idx : chosen) {
        Sequence s(n);
        std::size_t parity = 0;
        for (std::size_t b = 0; b + 1 < n; ++b) {
            s[b] = static_cast<std::size_t>((idx >> (n - 2 - b)) & 1U);
            parity ^= s[b];
        }
        s[n - 1] = parity;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<ExperimentRow> run_experiment(std::size_t n, const std::vector<double>& fractions, std::size_t replicas,
                                          std::uint64_t base_seed, const TrainConfig& cfg, std::size_t threads) {
    if (n < 2 || n > 24) throw std::invalid_argument("run_experiment: n must be in [2, 24]");
    if (fractions.empty()) throw std::invalid_argument("run_experiment: no fractions");
    if (replicas < 1) throw std::invalid_argument("run_experiment: replicas must be >= 1");
    const double space = std::ldexp(1.0, static_cast<int>(n - 1));
    std::vector<std::size_t> sizes;
    for (double f : fractions) {
        if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("run_experiment: fraction must be in (0, 1]");
        const auto nt = static_cast<std::size_t>(std::llround(f * space));
        if (nt < 1) {
            throw std::invalid_argument("run_experiment: fraction " + std::to_string(f) + " gives no samples");
        }
        sizes.push_back(nt);
    }

    const MatrixProductState target = parity_target(n);
    const std::size_t jobs = fractions.size() * replicas;
    std::vector<ExperimentRow> rows(jobs);
    std::vector<std::exception_ptr> errors(jobs);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t j = next++; j < jobs; j = next++) {
            const std::size_t fi = j / replicas;
            const std::size_t r = j % replicas;
            const std::uint64_t seed = base_seed + r;
            try {
                SequenceDataset ds(Alphabet({"0", "1"}), draw_even_strings(n, sizes[fi], seed), "");
                const MatrixProductState model = train(ds, cfg);
                rows[j] = {fractions[fi], r, seed, sizes[fi], bhattacharyya(model, target)};
            } catch (...) {
                errors[j] = std::current_exception();
            }
        }
    };

    std::size_t workers = threads != 0 ? threads : std::max(1U, std::thread::hardware_concurrency());
    workers = std::min(workers, jobs);
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

}  // namespace qdensity::mps
