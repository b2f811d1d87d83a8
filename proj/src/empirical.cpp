#include "qdensity/empirical.hpp"

#include <cmath>
#include <stdexcept>

namespace qdensity {

namespace {

// All sequences of the given length over d symbols, last position fastest.
std::vector<Sequence> all_sequences(std::size_t d, std::size_t length) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < length; ++i) {
        if (total > (std::size_t{1} << 24) / d) throw std::invalid_argument("full product vertex set is too large");
        total *= d;
    }
    std::vector<Sequence> out;
    out.reserve(total);
    Sequence cur(length, 0);
    for (std::size_t n = 0; n < total; ++n) {
        out.push_back(cur);
        for (std::size_t p = length; p-- > 0;) {
            if (++cur[p] < d) break;
            cur[p] = 0;
        }
    }
    return out;
}

struct VertexTable {
    std::vector<std::string> labels;
    std::vector<Sequence> tokens;
    std::map<Sequence, std::size_t> index;

    std::size_t add(const Sequence& s, const std::string& label) {
        auto [it, inserted] = index.emplace(s, labels.size());
        if (inserted) {
            labels.push_back(label);
            tokens.push_back(s);
        }
        return it->second;
    }
};

}  // namespace

SequenceDataset::SequenceDataset(const std::vector<std::vector<std::string>>& samples, std::string separator)
    : separator_(std::move(separator)) {
    if (samples.empty()) throw std::invalid_argument("dataset is empty");
    std::vector<std::string> symbols;
    std::unordered_map<std::string, std::size_t> seen;
    samples_.reserve(samples.size());
    for (const auto& raw : samples) {
        Sequence s;
        s.reserve(raw.size());
        for (const auto& tok : raw) {
            auto [it, inserted] = seen.emplace(tok, symbols.size());
            if (inserted) symbols.push_back(tok);
            s.push_back(it->second);
        }
        samples_.push_back(std::move(s));
    }
    alphabet_ = Alphabet(std::move(symbols));
    validate();
}

SequenceDataset::SequenceDataset(Alphabet alphabet, std::vector<Sequence> samples, std::string separator)
    : alphabet_(std::move(alphabet)), samples_(std::move(samples)), separator_(std::move(separator)) {
    validate();
}

SequenceDataset SequenceDataset::from_bitstrings(const std::vector<std::string>& lines) {
    std::vector<Sequence> samples;
    samples.reserve(lines.size());
    for (const auto& line : lines) {
        Sequence s;
        s.reserve(line.size());
        for (char c : line) {
            if (c != '0' && c != '1') throw std::invalid_argument("bitstring contains '" + std::string(1, c) + "'");
            s.push_back(static_cast<std::size_t>(c - '0'));
        }
        samples.push_back(std::move(s));
    }
    return SequenceDataset(Alphabet({"0", "1"}), std::move(samples), "");
}

void SequenceDataset::validate() {
    if (samples_.empty()) throw std::invalid_argument("dataset is empty");
    length_ = samples_.front().size();
    if (length_ == 0) throw std::invalid_argument("dataset samples are empty");
    for (std::size_t n = 0; n < samples_.size(); ++n) {
        if (samples_[n].size() != length_) {
            throw std::invalid_argument("sample " + std::to_string(n + 1) + " has length " +
                                        std::to_string(samples_[n].size()) + ", expected " + std::to_string(length_));
        }
        for (std::size_t t : samples_[n]) {
            if (t >= alphabet_.size()) throw std::invalid_argument("sample token outside alphabet");
        }
    }
}

std::string SequenceDataset::label(const Sequence& s, std::size_t begin, std::size_t end) const {
    std::string out;
    for (std::size_t p = begin; p < end; ++p) {
        if (p > begin) out += separator_;
        out += alphabet_.symbol(s[p]);
    }
    return out;
}

EmpiricalGraph build_graph(const SequenceDataset& ds, std::size_t k, VertexSet vertices) {
    const std::size_t n = ds.length();
    if (k < 1 || k >= n) {
        throw std::invalid_argument("cut " + std::to_string(k) + " must satisfy 1 <= k < " + std::to_string(n));
    }
    VertexTable pre;
    VertexTable suf;
    if (vertices == VertexSet::full_product) {
        const std::size_t d = ds.alphabet().size();
        for (const auto& s : all_sequences(d, k)) pre.add(s, ds.label(s, 0, k));
        for (const auto& s : all_sequences(d, n - k)) suf.add(s, ds.label(s, 0, n - k));
    }

    EmpiricalGraph g;
    for (const auto& sample : ds.samples()) {
        const Sequence p(sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(k));
        const Sequence s(sample.begin() + static_cast<std::ptrdiff_t>(k), sample.end());
        const std::size_t i = pre.add(p, ds.label(sample, 0, k));
        const std::size_t a = suf.add(s, ds.label(sample, k, n));
        ++g.edge_counts[{i, a}];
    }
    g.total_edges = ds.size();
    g.prefix_counts.assign(pre.labels.size(), 0);
    g.suffix_counts.assign(suf.labels.size(), 0);
    for (const auto& [key, c] : g.edge_counts) {
        g.prefix_counts[key.first] += c;
        g.suffix_counts[key.second] += c;
    }
    g.prefixes = Alphabet(std::move(pre.labels));
    g.suffixes = Alphabet(std::move(suf.labels));
    g.prefix_tokens = std::move(pre.tokens);
    g.suffix_tokens = std::move(suf.tokens);
    return g;
}

EmpiricalGraph reorder_prefixes(const EmpiricalGraph& g, const std::vector<std::string>& order) {
    if (order.size() != g.prefixes.size()) {
        throw std::invalid_argument("reorder_prefixes: expected " + std::to_string(g.prefixes.size()) + " labels");
    }
    std::vector<std::size_t> old_of_new(order.size());
    std::vector<std::size_t> new_of_old(order.size());
    for (std::size_t j = 0; j < order.size(); ++j) {
        const auto idx = g.prefixes.index_of(order[j]);
        if (!idx) throw std::invalid_argument("reorder_prefixes: unknown prefix '" + order[j] + "'");
        old_of_new[j] = *idx;
        new_of_old[*idx] = j;
    }
    EmpiricalGraph out;
    out.prefixes = Alphabet(order);
    out.suffixes = g.suffixes;
    out.suffix_tokens = g.suffix_tokens;
    out.suffix_counts = g.suffix_counts;
    out.total_edges = g.total_edges;
    for (std::size_t j = 0; j < order.size(); ++j) {
        out.prefix_tokens.push_back(g.prefix_tokens[old_of_new[j]]);
        out.prefix_counts.push_back(g.prefix_counts[old_of_new[j]]);
    }
    for (const auto& [key, c] : g.edge_counts) out.edge_counts[{new_of_old[key.first], key.second}] = c;
    return out;
}

EmpiricalGraph parity_ordered(const EmpiricalGraph& g) {
    std::vector<std::string> order{"00", "11", "01", "10"};
    for (const auto& p : g.prefixes.symbols()) {
        if (p != "00" && p != "11" && p != "01" && p != "10") {
            throw std::invalid_argument("parity_ordered: prefix '" + p + "' is not a two-bit string");
        }
    }
    // Observed vertex sets may lack some of the four prefixes.
    std::vector<std::string> present;
    for (const auto& p : order) {
        if (g.prefixes.index_of(p)) present.push_back(p);
    }
    return reorder_prefixes(g, present);
}

JointDistribution empirical_distribution(const EmpiricalGraph& g) {
    if (g.total_edges == 0) throw std::invalid_argument("empirical_distribution: empty graph");
    const std::size_t ny = g.suffixes.size();
    std::vector<double> probs(g.prefixes.size() * ny, 0.0);
    const double nt = static_cast<double>(g.total_edges);
    for (const auto& [key, c] : g.edge_counts) probs[key.first * ny + key.second] = static_cast<double>(c) / nt;
    return JointDistribution(g.prefixes, g.suffixes, std::move(probs));
}

JointDistribution empirical_distribution(const SequenceDataset& ds, std::size_t k, VertexSet vertices) {
    return empirical_distribution(build_graph(ds, k, vertices));
}

DensityMatrix graph_reduced_density(const EmpiricalGraph& g, Side keep) {
    if (g.total_edges == 0) throw std::invalid_argument("graph_reduced_density: empty graph");
    const bool prefix_side = keep == Side::X;
    const std::size_t n = prefix_side ? g.prefixes.size() : g.suffixes.size();
    // Neighbour lists of the traced side: for every vertex on the other side,
    // the kept-side vertices it touches with their multiplicities.
    std::map<std::size_t, std::vector<std::pair<std::size_t, double>>> by_other;
    for (const auto& [key, c] : g.edge_counts) {
        const auto [i, a] = key;
        if (prefix_side) {
            by_other[a].emplace_back(i, static_cast<double>(c));
        } else {
            by_other[i].emplace_back(a, static_cast<double>(c));
        }
    }
    Matrix m(n, n);
    for (const auto& [other, nbrs] : by_other) {
        for (const auto& [u, cu] : nbrs) {
            for (const auto& [v, cv] : nbrs) m(u, v) += u == v ? cu : std::sqrt(cu * cv);
        }
    }
    m *= 1.0 / static_cast<double>(g.total_edges);
    return DensityMatrix(prefix_side ? g.prefixes : g.suffixes, std::move(m));
}

double block_angle(double d1, double d2, double s) {
    if (s == 0.0) return 0.0;
    const double gap = d1 - d2;
    return std::atan(2.0 * s / (std::sqrt(gap * gap + 4.0 * s * s) + gap));
}

SummarizerAngles summarizer_angles(const EmpiricalGraph& g) {
    const DensityMatrix rho = graph_reduced_density(g, Side::X);
    auto at = [&](const char* label) {
        const auto idx = g.prefixes.index_of(label);
        if (!idx) throw std::invalid_argument(std::string("summarizer_angles: prefix ") + label + " missing");
        return *idx;
    };
    const std::size_t e0 = at("00"), e1 = at("11"), o0 = at("01"), o1 = at("10");
    const Matrix& m = rho.matrix();
    // The formula is scale-free, so densities stand in for raw counts.
    return {block_angle(m(e0, e0), m(e1, e1), m(e0, e1)), block_angle(m(o0, o0), m(o1, o1), m(o0, o1))};
}

}  // namespace qdensity
