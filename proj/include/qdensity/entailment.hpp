#pragma once

// Densities on the last position of a corpus attached to position-anchored
// prefix patterns, their conditional decomposition and Loewner comparisons.

#include "qdensity/empirical.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace qdensity::entailment {

struct Assignment {
    std::size_t position;  // 0-based prefix slot
    std::string token;
    bool operator==(const Assignment&) const = default;
};

using Pattern = std::vector<Assignment>;

/// Parses "3=orange,2=ripe" (1-based positions; "pos3=orange" also accepted).
Pattern parse_pattern(const std::string& text);
std::string format_pattern(const Pattern& p);

/// True when `finer` assigns every slot `coarser` assigns, with the same token.
bool refines(const Pattern& finer, const Pattern& coarser);

class CorpusState {
public:
    /// Cut at N−1: the prefix is everything but the last token.
    explicit CorpusState(SequenceDataset ds);

    const SequenceDataset& dataset() const { return ds_; }
    const EmpiricalGraph& graph() const { return graph_; }
    std::size_t prefix_length() const { return ds_.length() - 1; }
    const Alphabet& suffix_basis() const { return graph_.suffixes; }

    /// Column of M for observed prefix x: entries √(c(x,y)/N_T) over suffixes.
    const std::vector<double>& column(std::size_t prefix) const { return columns_[prefix]; }

    bool matches(std::size_t prefix, const Pattern& p) const;
    std::vector<std::size_t> matching_prefixes(const Pattern& p) const;

    /// ρ_Y of the corpus state.
    DensityMatrix reduced_suffix_density() const;

private:
    SequenceDataset ds_;
    EmpiricalGraph graph_;
    std::vector<std::vector<double>> columns_;
};

struct EntailmentDensity {
    Pattern pattern;
    Alphabet basis;
    Matrix matrix;
    double weight;  // π̂(pattern), the trace before normalization
    bool normalized;
};

/// Σ_x M|x⟩⟨x|Mᵀ over observed prefixes x matching p; optionally trace-normalized.
EntailmentDensity pattern_density(const CorpusState& cs, const Pattern& p, bool normalized);

struct DecompositionTerm {
    std::string prefix;
    double weight;  // π(x | p)
    EntailmentDensity density;
};

std::vector<DecompositionTerm> decompose(const CorpusState& cs, const Pattern& p);

inline constexpr double kLoewnerTolerance = 1e-10;

/// Smallest eigenvalue of a − scale·b.
double loewner_margin(const EntailmentDensity& a, const EntailmentDensity& b, double scale);
bool loewner_geq(const EntailmentDensity& a, const EntailmentDensity& b, double scale);

}  // namespace qdensity::entailment
