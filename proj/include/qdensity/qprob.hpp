#pragma once

// Joint distributions on X×Y, the pure state ψ(x,y) = √π(x,y), density
// matrices, reduced densities and their spectra.
//
// Every object indexed by a product X×Y uses the suffix-major layout: the
// pair (x_i, y_α) sits at flat index α·|X| + i.

#include "qdensity/linalg.hpp"

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace qdensity {

using linalg::Matrix;

class Alphabet {
public:
    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> symbols);

    std::size_t size() const { return symbols_.size(); }
    const std::string& symbol(std::size_t i) const { return symbols_.at(i); }
    const std::vector<std::string>& symbols() const { return symbols_; }
    std::optional<std::size_t> index_of(const std::string& s) const;

    bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

private:
    std::vector<std::string> symbols_;
    std::unordered_map<std::string, std::size_t> index_;
};

enum class Side { X, Y };

inline std::size_t pair_index(std::size_t i, std::size_t alpha, std::size_t x_size) { return alpha * x_size + i; }

class JointDistribution {
public:
    // probs is indexed [i·|Y| + α] (x-major, as read from a table).
    JointDistribution(Alphabet x, Alphabet y, std::vector<double> probs);

    const Alphabet& x_alphabet() const { return x_; }
    const Alphabet& y_alphabet() const { return y_; }
    double prob(std::size_t i, std::size_t alpha) const { return probs_[i * y_.size() + alpha]; }
    std::span<const double> table() const { return probs_; }

private:
    Alphabet x_;
    Alphabet y_;
    std::vector<double> probs_;
};

class PureState {
public:
    // amplitudes in suffix-major layout; must be nonnegative with unit norm.
    PureState(Alphabet x, Alphabet y, std::vector<double> amplitudes);

    const Alphabet& x_alphabet() const { return x_; }
    const Alphabet& y_alphabet() const { return y_; }
    double amplitude(std::size_t i, std::size_t alpha) const { return amps_[pair_index(i, alpha, x_.size())]; }
    std::span<const double> amplitudes() const { return amps_; }

    /// |Y|×|X| coefficient matrix, M(α, i) = ψ(x_i, y_α).
    Matrix coefficient_matrix() const;

private:
    Alphabet x_;
    Alphabet y_;
    std::vector<double> amps_;
};

class DensityMatrix {
public:
    // Symmetry and unit trace are checked here (1e-10). Positivity is not,
    // since it costs a full eigendecomposition; see is_psd.
    DensityMatrix(Alphabet basis, Matrix m);
    DensityMatrix(Alphabet x, Alphabet y, Matrix m);

    const Matrix& matrix() const { return m_; }
    std::size_t dim() const { return m_.rows(); }
    bool is_product() const { return product_; }

    /// Basis of a non-product density.
    const Alphabet& basis() const;
    /// Factors of a product density.
    const Alphabet& x_factor() const;
    const Alphabet& y_factor() const;

    /// Human-readable basis labels; product labels are "x|y".
    std::vector<std::string> labels() const;

private:
    Alphabet first_;
    Alphabet second_;
    bool product_ = false;
    Matrix m_;
};

struct SchmidtData {
    Alphabet x_alphabet;
    Alphabet y_alphabet;
    std::vector<double> coefficients;  // σ_i, descending
    Matrix x_vectors;                  // |X|×r
    Matrix y_vectors;                  // |Y|×r
};

PureState build_state(const JointDistribution& pi);

DensityMatrix density_diag(const JointDistribution& pi);
DensityMatrix density_diag(const Alphabet& basis, std::span<const double> probs);

DensityMatrix density_projection(const PureState& psi);

DensityMatrix partial_trace(const DensityMatrix& rho, Side keep);

/// keep=X: MᵀM, keep=Y: MMᵀ.
DensityMatrix reduced_via_gram(const PureState& psi, Side keep);

/// Σ_i A_i |ψ⟩⟨ψ| A_iᵀ with A_i the slice maps of the traced factor.
DensityMatrix kraus_reduced(const PureState& psi, Side keep);

std::vector<double> born_distribution(const DensityMatrix& rho);

std::vector<double> marginalize(const JointDistribution& pi, Side keep);

SchmidtData schmidt(const PureState& psi);

/// Σ σ_i y_i ⊗ x_i in suffix-major layout, signs preserved.
std::vector<double> reconstruct_amplitudes(const SchmidtData& sd);

/// reconstruct_amplitudes as a PureState. Entries in (-1e-10, 0) are rounding
/// noise and clamp to 0; anything more negative throws.
PureState reconstruct_state(const SchmidtData& sd);

// Eigenvalues at or below this are dropped from entropies.
inline constexpr double kEntropyCutoff = 1e-14;

double von_neumann_entropy(const DensityMatrix& rho);
double entanglement_entropy(const PureState& psi);

}  // namespace qdensity
