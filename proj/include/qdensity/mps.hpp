#pragma once

// Matrix product states built by a left-to-right sweep over a sample set,
// plus exact evaluation, sampling and the parity-learning experiment.

#include "qdensity/empirical.hpp"

#include <cstddef>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace qdensity::mps {

struct Tensor3 {
    std::size_t left = 0;
    std::size_t phys = 0;
    std::size_t right = 0;
    std::vector<double> data;  // [l][s][r], r fastest

    Tensor3() = default;
    Tensor3(std::size_t l, std::size_t s, std::size_t r) : left(l), phys(s), right(r), data(l * s * r, 0.0) {}

    double operator()(std::size_t l, std::size_t s, std::size_t r) const { return data[(l * phys + s) * right + r]; }
    double& operator()(std::size_t l, std::size_t s, std::size_t r) { return data[(l * phys + s) * right + r]; }
};

class MatrixProductState {
public:
    MatrixProductState(std::size_t physical_dim, std::vector<Tensor3> tensors);

    std::size_t n() const { return tensors_.size(); }
    std::size_t physical_dim() const { return d_; }
    const std::vector<Tensor3>& tensors() const { return tensors_; }
    /// Right bond of each tensor; the last entry is 1.
    std::vector<std::size_t> bond_dims() const;

private:
    std::size_t d_;
    std::vector<Tensor3> tensors_;
};

struct TrainConfig {
    std::size_t chi = 2;
    std::uint64_t seed = 0;  // the sweep is deterministic; kept for the experiment driver
    double tolerance = 1e-10;
};

struct SweepStep {
    std::size_t site;       // 0-based site whose tensor this step produced
    Matrix rho;             // unit-trace density on bond ⊗ physical, index a·d + s
    std::vector<double> eigenvalues;
    Matrix group_matrix;    // columns: unnormalized vectors per distinct suffix
};

struct TrainTrace {
    std::vector<SweepStep> steps;
};

MatrixProductState train(const SequenceDataset& ds, const TrainConfig& cfg, TrainTrace* trace = nullptr);

double amplitude(const MatrixProductState& m, std::span<const std::size_t> s);
double born_probability(const MatrixProductState& m, std::span<const std::size_t> s);

/// Exact MPS with Born distribution uniform on even-parity bitstrings of length n.
MatrixProductState parity_target(std::size_t n);

double inner_product(const MatrixProductState& a, const MatrixProductState& b);

inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

/// −ln Σ √(p q); infinity when the sum is not positive.
double bhattacharyya(std::span<const double> p, std::span<const double> q);

/// Same, with distributions given as functions on {0, …, size−1}.
template <class P, class Q>
double bhattacharyya(std::size_t size, P&& p, Q&& q) {
    double acc = 0.0;
    for (std::size_t i = 0; i < size; ++i) acc += std::sqrt(p(i) * q(i));
    return acc > 0.0 ? -std::log(acc) : kInfiniteDistance;
}

/// −ln ⟨a|b⟩ for states with nonnegative overlap.
double bhattacharyya(const MatrixProductState& a, const MatrixProductState& b);

// Portable draws from a 64-bit engine.
double uniform_unit(std::mt19937_64& rng);
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

std::vector<Sequence> sample(const MatrixProductState& m, std::size_t count, std::uint64_t seed);

/// Isometric MPS with random tensors and bond dimension ≤ chi.
MatrixProductState random_isometric(std::size_t n, std::size_t chi, std::uint64_t seed);

/// `count` distinct even-parity bitstrings of length n, sorted.
std::vector<Sequence> draw_even_strings(std::size_t n, std::size_t count, std::uint64_t seed);

struct ExperimentRow {
    double fraction;
    std::size_t replica;
    std::uint64_t seed;
    std::size_t n_samples;
    double bhattacharyya;
};

/// Rows ordered by fraction (input order), then replica. threads == 0 means
/// one worker per hardware thread.
std::vector<ExperimentRow> run_experiment(std::size_t n, const std::vector<double>& fractions, std::size_t replicas,
                                          std::uint64_t base_seed, const TrainConfig& cfg, std::size_t threads = 0);

}  // namespace qdensity::mps
