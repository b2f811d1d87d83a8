#pragma once

// Sequence datasets, their prefix/suffix bipartite graphs and the reduced
// densities that can be read off the graph by counting paths of length two.

#include "qdensity/qprob.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace qdensity {

using Sequence = std::vector<std::size_t>;

class SequenceDataset {
public:
    // Alphabet inferred in first-appearance order. `separator` joins tokens
    // into prefix/suffix labels.
    explicit SequenceDataset(const std::vector<std::vector<std::string>>& samples, std::string separator = " ");
    SequenceDataset(Alphabet alphabet, std::vector<Sequence> samples, std::string separator = " ");

    /// Alphabet fixed to {"0","1"}; labels are the bits without separator.
    static SequenceDataset from_bitstrings(const std::vector<std::string>& lines);

    const Alphabet& alphabet() const { return alphabet_; }
    std::size_t length() const { return length_; }
    std::size_t size() const { return samples_.size(); }
    const std::vector<Sequence>& samples() const { return samples_; }
    const std::string& separator() const { return separator_; }

    std::string label(const Sequence& s, std::size_t begin, std::size_t end) const;

private:
    void validate();

    Alphabet alphabet_;
    std::size_t length_ = 0;
    std::vector<Sequence> samples_;
    std::string separator_;
};

enum class VertexSet {
    observed,      // prefixes/suffixes in first-appearance order
    full_product,  // every sequence over the alphabet, natural (lexicographic) order
};

struct EmpiricalGraph {
    Alphabet prefixes;
    Alphabet suffixes;
    std::vector<Sequence> prefix_tokens;
    std::vector<Sequence> suffix_tokens;
    std::vector<std::size_t> prefix_counts;
    std::vector<std::size_t> suffix_counts;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_counts;  // (prefix, suffix) -> count
    std::size_t total_edges = 0;
};

/// Split every sample at position k (prefix = first k tokens).
EmpiricalGraph build_graph(const SequenceDataset& ds, std::size_t k, VertexSet vertices = VertexSet::observed);

/// Reorder prefix vertices; `order` lists prefix labels, all of which must exist.
EmpiricalGraph reorder_prefixes(const EmpiricalGraph& g, const std::vector<std::string>& order);

/// Prefixes reordered to {00, 11, 01, 10}: even block first, then odd.
EmpiricalGraph parity_ordered(const EmpiricalGraph& g);

/// π̂(x, y) = count(x, y) / N_T over the graph's vertex sets.
JointDistribution empirical_distribution(const EmpiricalGraph& g);
JointDistribution empirical_distribution(const SequenceDataset& ds, std::size_t k,
                                         VertexSet vertices = VertexSet::observed);

/// Entry (i, j) = Σ_y √(c(i,y)·c(j,y)) / N_T; with 0/1 multiplicities this is
/// the number of length-two paths between i and j over N_T.
DensityMatrix graph_reduced_density(const EmpiricalGraph& g, Side keep);

struct SummarizerAngles {
    double theta;  // even block {00, 11}
    double phi;    // odd block {01, 10}
};

/// Angle of the top eigenvector of [[d1, s],[s, d2]]; 0 when s == 0.
double block_angle(double d1, double d2, double s);

/// Requires the prefix vertices to include 00, 11, 01 and 10.
SummarizerAngles summarizer_angles(const EmpiricalGraph& g);

}  // namespace qdensity
