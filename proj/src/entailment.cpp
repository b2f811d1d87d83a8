#include "qdensity/entailment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qdensity::entailment {

Pattern parse_pattern(const std::string& text) {
    Pattern p;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        std::string item = text.substr(start, comma - start);
        start = comma + 1;
        if (item.empty()) {
            if (comma == text.size()) break;
            throw std::invalid_argument("pattern '" + text + "': empty assignment");
        }
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos || eq + 1 == item.size()) {
            throw std::invalid_argument("pattern assignment '" + item + "' is not POSITION=TOKEN");
        }
        std::string pos = item.substr(0, eq);
        if (pos.rfind("pos", 0) == 0) pos = pos.substr(3);
        if (pos.empty() || !std::all_of(pos.begin(), pos.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            throw std::invalid_argument("pattern assignment '" + item + "': bad position");
        }
        const std::size_t one_based = std::stoul(pos);
        if (one_based == 0) throw std::invalid_argument("pattern positions start at 1");
        Assignment a{one_based - 1, item.substr(eq + 1)};
        auto clash = std::find_if(p.begin(), p.end(), [&](const Assignment& b) { return b.position == a.position; });
        if (clash != p.end()) {
            if (clash->token != a.token) throw std::invalid_argument("pattern assigns position " + pos + " twice");
            continue;
        }
        p.push_back(std::move(a));
    }
    if (p.empty()) throw std::invalid_argument("pattern is empty");
    std::sort(p.begin(), p.end(), [](const Assignment& a, const Assignment& b) { return a.position < b.position; });
    return p;
}

std::string format_pattern(const Pattern& p) {
    std::string out;
    for (const auto& a : p) {
        if (!out.empty()) out += ',';
        out += std::to_string(a.position + 1) + "=" + a.token;
    }
    return out;
}

bool refines(const Pattern& finer, const Pattern& coarser) {
    for (const auto& c : coarser) {
        if (std::find(finer.begin(), finer.end(), c) == finer.end()) return false;
    }
    return true;
}

CorpusState::CorpusState(SequenceDataset ds) : ds_(std::move(ds)) {
    if (ds_.length() < 2) throw std::invalid_argument("corpus samples need at least two tokens");
    graph_ = build_graph(ds_, ds_.length() - 1, VertexSet::observed);
    const double nt = static_cast<double>(graph_.total_edges);
    columns_.assign(graph_.prefixes.size(), std::vector<double>(graph_.suffixes.size(), 0.0));
    for (const auto& [key, c] : graph_.edge_counts) {
        columns_[key.first][key.second] = std::sqrt(static_cast<double>(c) / nt);
    }
}

bool CorpusState::matches(std::size_t prefix, const Pattern& p) const {
    const Sequence& toks = graph_.prefix_tokens[prefix];
    for (const auto& a : p) {
        if (a.position >= toks.size()) return false;
        if (ds_.alphabet().symbol(toks[a.position]) != a.token) return false;
    }
    return true;
}

std::vector<std::size_t> CorpusState::matching_prefixes(const Pattern& p) const {
    for (const auto& a : p) {
        if (a.position >= prefix_length()) {
            throw std::invalid_argument("pattern position " + std::to_string(a.position + 1) +
                                        " is outside the prefix (length " + std::to_string(prefix_length()) + ")");
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t x = 0; x < graph_.prefixes.size(); ++x) {
        if (matches(x, p)) out.push_back(x);
    }
    if (out.empty()) throw std::invalid_argument("pattern unobserved: " + format_pattern(p));
    return out;
}

DensityMatrix CorpusState::reduced_suffix_density() const {
    const std::size_t ny = graph_.suffixes.size();
    Matrix m(ny, ny);
    for (const auto& col : columns_) m += linalg::outer(col, col);
    return DensityMatrix(graph_.suffixes, std::move(m));
}

EntailmentDensity pattern_density(const CorpusState& cs, const Pattern& p, bool normalized) {
    const std::size_t ny = cs.suffix_basis().size();
    Matrix m(ny, ny);
    for (std::size_t x : cs.matching_prefixes(p)) m += linalg::outer(cs.column(x), cs.column(x));
    const double weight = m.trace();
    if (normalized) m *= 1.0 / weight;
    return {p, cs.suffix_basis(), std::move(m), weight, normalized};
}

std::vector<DecompositionTerm> decompose(const CorpusState& cs, const Pattern& p) {
    const auto xs = cs.matching_prefixes(p);
    std::size_t total = 0;
    for (std::size_t x : xs) total += cs.graph().prefix_counts[x];
    std::vector<DecompositionTerm> out;
    for (std::size_t x : xs) {
        const Sequence& toks = cs.graph().prefix_tokens[x];
        Pattern full;
        for (std::size_t pos = 0; pos < toks.size(); ++pos) {
            full.push_back({pos, cs.dataset().alphabet().symbol(toks[pos])});
        }
        const double w = static_cast<double>(cs.graph().prefix_counts[x]) / static_cast<double>(total);
        out.push_back({cs.graph().prefixes.symbol(x), w, pattern_density(cs, full, true)});
    }
    return out;
}

double loewner_margin(const EntailmentDensity& a, const EntailmentDensity& b, double scale) {
    if (!(a.basis == b.basis)) throw std::invalid_argument("loewner: densities live on different bases");
    if (!(scale >= 0.0) || !std::isfinite(scale)) throw std::invalid_argument("loewner: scale must be nonnegative");
    return linalg::min_eigenvalue(a.matrix - scale * b.matrix);
}

bool loewner_geq(const EntailmentDensity& a, const EntailmentDensity& b, double scale) {
    return loewner_margin(a, b, scale) >= -kLoewnerTolerance;
}

}  // namespace qdensity::entailment
