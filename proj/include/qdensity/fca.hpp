#pragma once

// Formal concepts of a binary relation R ⊆ X×Y and a comparison against the
// eigenvectors of the reduced densities of the uniform state on R.

#include "qdensity/qprob.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace qdensity::fca {

using Subset = std::vector<bool>;

class Relation {
public:
    Relation(Alphabet x, Alphabet y, std::vector<bool> incidence);
    /// Alphabets in first-appearance order; duplicate pairs are rejected.
    static Relation from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs);

    const Alphabet& x_alphabet() const { return x_; }
    const Alphabet& y_alphabet() const { return y_; }
    bool related(std::size_t i, std::size_t a) const { return incidence_[i * y_.size() + a]; }
    std::size_t edge_count() const;

private:
    Alphabet x_;
    Alphabet y_;
    std::vector<bool> incidence_;
};

struct FormalConcept {
    Subset extent;  // over X
    Subset intent;  // over Y
    bool operator==(const FormalConcept&) const = default;
};

/// Attributes shared by every object in a; f(∅) = Y.
Subset galois_f(const Relation& r, const Subset& a);
/// Objects having every attribute in b; g(∅) = X.
Subset galois_g(const Relation& r, const Subset& b);

inline constexpr std::size_t kMaxSide = 24;

/// Every closed pair, extent size descending then extent indices ascending.
std::vector<FormalConcept> formal_concepts(const Relation& r);
/// formal_concepts without the pairs whose extent or intent is empty.
std::vector<FormalConcept> proper_concepts(const Relation& r);

bool is_subset(const Subset& a, const Subset& b);
std::vector<std::string> members(const Subset& s, const Alphabet& alphabet);

struct EigenMatch {
    double eigenvalue;
    std::vector<double> x_vector;
    std::vector<double> y_vector;
    int concept_index;  // into EigenConceptReport::concepts, -1 if none
    double extent_cosine;
    double intent_cosine;
    bool exact;  // both cosines equal 1 within kCosineTolerance
};

struct EigenConceptReport {
    std::vector<FormalConcept> concepts;  // proper concepts
    std::vector<EigenMatch> eigenpairs;   // nonzero eigenvalues only
    std::size_t matched = 0;              // eigenpairs with an exact concept
    std::size_t unmatched_eigenpairs = 0;
    std::size_t unmatched_concepts = 0;   // concepts no eigenpair matches exactly
    bool coincide = false;                // exact bijection between the two lists
};

inline constexpr double kCosineTolerance = 1e-9;

/// Pairs each eigenpair with the concept maximizing extent·intent cosine
/// similarity against |e_i| and |f_i|.
EigenConceptReport compare_eigen_concepts(const Relation& r);

}  // namespace qdensity::fca
