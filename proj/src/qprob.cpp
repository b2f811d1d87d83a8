#include "qdensity/qprob.hpp"

#include <cmath>
#include <stdexcept>

namespace qdensity {

namespace {

constexpr double kNormTolerance = 1e-10;

double sum_squares(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

void require_unit_norm(const PureState& psi, double tol, const char* what) {
    const double n = sum_squares(psi.amplitudes());
    if (std::abs(n - 1.0) > tol) {
        throw std::invalid_argument(std::string(what) + ": state norm² is " + std::to_string(n));
    }
}

}  // namespace

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw std::invalid_argument("Alphabet: empty");
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        if (!index_.emplace(symbols_[i], i).second) {
            throw std::invalid_argument("Alphabet: duplicate symbol '" + symbols_[i] + "'");
        }
    }
}

std::optional<std::size_t> Alphabet::index_of(const std::string& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

JointDistribution::JointDistribution(Alphabet x, Alphabet y, std::vector<double> probs)
    : x_(std::move(x)), y_(std::move(y)), probs_(std::move(probs)) {
    if (probs_.size() != x_.size() * y_.size()) {
        throw linalg::DimensionError("JointDistribution: table has " + std::to_string(probs_.size()) +
                                     " entries, expected " + std::to_string(x_.size() * y_.size()));
    }
    double total = 0.0;
    for (double p : probs_) {
        if (!std::isfinite(p) || p < 0.0) throw std::invalid_argument("JointDistribution: negative or non-finite entry");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("JointDistribution: probabilities sum to " + std::to_string(total));
    }
}

PureState::PureState(Alphabet x, Alphabet y, std::vector<double> amplitudes)
    : x_(std::move(x)), y_(std::move(y)), amps_(std::move(amplitudes)) {
    if (amps_.size() != x_.size() * y_.size()) {
        throw linalg::DimensionError("PureState: expected " + std::to_string(x_.size() * y_.size()) +
                                     " amplitudes, got " + std::to_string(amps_.size()));
    }
    for (double a : amps_) {
        if (!std::isfinite(a) || a < 0.0) throw std::invalid_argument("PureState: amplitudes must be nonnegative");
    }
    require_unit_norm(*this, kNormTolerance, "PureState");
}

Matrix PureState::coefficient_matrix() const {
    return linalg::reshape_vector_to_matrix(amps_, y_.size(), x_.size());
}

DensityMatrix::DensityMatrix(Alphabet basis, Matrix m) : first_(std::move(basis)), m_(std::move(m)) {
    if (!m_.is_square() || m_.rows() != first_.size()) {
        throw linalg::DimensionError("DensityMatrix: matrix does not match basis size " +
                                     std::to_string(first_.size()));
    }
    if (!linalg::is_symmetric(m_, 1e-10)) throw linalg::SymmetryError("DensityMatrix: not symmetric");
    if (std::abs(m_.trace() - 1.0) > 1e-10) {
        throw std::invalid_argument("DensityMatrix: trace is " + std::to_string(m_.trace()));
    }
}

DensityMatrix::DensityMatrix(Alphabet x, Alphabet y, Matrix m)
    : first_(std::move(x)), second_(std::move(y)), product_(true), m_(std::move(m)) {
    const std::size_t n = first_.size() * second_.size();
    if (!m_.is_square() || m_.rows() != n) {
        throw linalg::DimensionError("DensityMatrix: matrix does not match product basis size " + std::to_string(n));
    }
    if (!linalg::is_symmetric(m_, 1e-10)) throw linalg::SymmetryError("DensityMatrix: not symmetric");
    if (std::abs(m_.trace() - 1.0) > 1e-10) {
        throw std::invalid_argument("DensityMatrix: trace is " + std::to_string(m_.trace()));
    }
}

const Alphabet& DensityMatrix::basis() const {
    if (product_) throw std::logic_error("DensityMatrix: basis() on a product density");
    return first_;
}

const Alphabet& DensityMatrix::x_factor() const {
    if (!product_) throw std::invalid_argument("DensityMatrix: basis is not a product");
    return first_;
}

const Alphabet& DensityMatrix::y_factor() const {
    if (!product_) throw std::invalid_argument("DensityMatrix: basis is not a product");
    return second_;
}

std::vector<std::string> DensityMatrix::labels() const {
    if (!product_) return first_.symbols();
    std::vector<std::string> out(dim());
    for (std::size_t a = 0; a < second_.size(); ++a) {
        for (std::size_t i = 0; i < first_.size(); ++i) {
            out[pair_index(i, a, first_.size())] = first_.symbol(i) + "|" + second_.symbol(a);
        }
    }
    return out;
}

PureState build_state(const JointDistribution& pi) {
    const std::size_t nx = pi.x_alphabet().size();
    const std::size_t ny = pi.y_alphabet().size();
    std::vector<double> amps(nx * ny);
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t a = 0; a < ny; ++a) amps[pair_index(i, a, nx)] = std::sqrt(pi.prob(i, a));
    }
    return PureState(pi.x_alphabet(), pi.y_alphabet(), std::move(amps));
}

DensityMatrix density_diag(const JointDistribution& pi) {
    const std::size_t nx = pi.x_alphabet().size();
    const std::size_t ny = pi.y_alphabet().size();
    Matrix m(nx * ny, nx * ny);
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t a = 0; a < ny; ++a) {
            const std::size_t k = pair_index(i, a, nx);
            m(k, k) = pi.prob(i, a);
        }
    }
    return DensityMatrix(pi.x_alphabet(), pi.y_alphabet(), std::move(m));
}

DensityMatrix density_diag(const Alphabet& basis, std::span<const double> probs) {
    if (probs.size() != basis.size()) throw linalg::DimensionError("density_diag: size mismatch");
    return DensityMatrix(basis, Matrix::diagonal(probs));
}

DensityMatrix density_projection(const PureState& psi) {
    require_unit_norm(psi, 1e-9, "density_projection");
    return DensityMatrix(psi.x_alphabet(), psi.y_alphabet(), linalg::outer(psi.amplitudes(), psi.amplitudes()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, Side keep) {
    if (!rho.is_product()) throw std::invalid_argument("partial_trace: basis is not a product");
    const std::size_t nx = rho.x_factor().size();
    const std::size_t ny = rho.y_factor().size();
    const Matrix& m = rho.matrix();
    if (keep == Side::X) {
        Matrix out(nx, nx);
        for (std::size_t i = 0; i < nx; ++i) {
            for (std::size_t j = 0; j < nx; ++j) {
                double acc = 0.0;
                for (std::size_t a = 0; a < ny; ++a) acc += m(pair_index(i, a, nx), pair_index(j, a, nx));
                out(i, j) = acc;
            }
        }
        return DensityMatrix(rho.x_factor(), std::move(out));
    }
    Matrix out(ny, ny);
    for (std::size_t a = 0; a < ny; ++a) {
        for (std::size_t b = 0; b < ny; ++b) {
            double acc = 0.0;
            for (std::size_t i = 0; i < nx; ++i) acc += m(pair_index(i, a, nx), pair_index(i, b, nx));
            out(a, b) = acc;
        }
    }
    return DensityMatrix(rho.y_factor(), std::move(out));
}

DensityMatrix reduced_via_gram(const PureState& psi, Side keep) {
    const Matrix m = psi.coefficient_matrix();
    if (keep == Side::X) return DensityMatrix(psi.x_alphabet(), linalg::gram(m));
    return DensityMatrix(psi.y_alphabet(), linalg::cogram(m));
}

DensityMatrix kraus_reduced(const PureState& psi, Side keep) {
    const std::size_t nx = psi.x_alphabet().size();
    const std::size_t ny = psi.y_alphabet().size();
    // A_k|ψ⟩ for each basis element k of the traced factor is a slice of ψ.
    if (keep == Side::Y) {
        Matrix out(ny, ny);
        std::vector<double> slice(ny);
        for (std::size_t i = 0; i < nx; ++i) {
            for (std::size_t a = 0; a < ny; ++a) slice[a] = psi.amplitude(i, a);
            out += linalg::outer(slice, slice);
        }
        return DensityMatrix(psi.y_alphabet(), std::move(out));
    }
    Matrix out(nx, nx);
    std::vector<double> slice(nx);
    for (std::size_t a = 0; a < ny; ++a) {
        for (std::size_t i = 0; i < nx; ++i) slice[i] = psi.amplitude(i, a);
        out += linalg::outer(slice, slice);
    }
    return DensityMatrix(psi.x_alphabet(), std::move(out));
}

std::vector<double> born_distribution(const DensityMatrix& rho) { return rho.matrix().diagonal_entries(); }

std::vector<double> marginalize(const JointDistribution& pi, Side keep) {
    const std::size_t nx = pi.x_alphabet().size();
    const std::size_t ny = pi.y_alphabet().size();
    std::vector<double> out(keep == Side::X ? nx : ny, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t a = 0; a < ny; ++a) out[keep == Side::X ? i : a] += pi.prob(i, a);
    }
    return out;
}

SchmidtData schmidt(const PureState& psi) {
    require_unit_norm(psi, 1e-9, "schmidt");
    linalg::Svd s = linalg::svd(psi.coefficient_matrix());
    return {psi.x_alphabet(), psi.y_alphabet(), std::move(s.singular_values), std::move(s.v), std::move(s.u)};
}

std::vector<double> reconstruct_amplitudes(const SchmidtData& sd) {
    const std::size_t nx = sd.x_alphabet.size();
    const std::size_t ny = sd.y_alphabet.size();
    const std::size_t r = sd.coefficients.size();
    if (sd.x_vectors.rows() != nx || sd.y_vectors.rows() != ny || sd.x_vectors.cols() != r ||
        sd.y_vectors.cols() != r) {
        throw linalg::DimensionError("reconstruct: Schmidt vectors do not match alphabets");
    }
    double norm = 0.0;
    for (double s : sd.coefficients) norm += s * s;
    if (std::abs(norm - 1.0) > 1e-10) {
        throw std::invalid_argument("reconstruct: Σσ² is " + std::to_string(norm));
    }
    std::vector<double> amps(nx * ny, 0.0);
    for (std::size_t k = 0; k < r; ++k) {
        const double s = sd.coefficients[k];
        if (s == 0.0) continue;
        for (std::size_t a = 0; a < ny; ++a) {
            const double ya = s * sd.y_vectors(a, k);
            for (std::size_t i = 0; i < nx; ++i) amps[pair_index(i, a, nx)] += ya * sd.x_vectors(i, k);
        }
    }
    return amps;
}

PureState reconstruct_state(const SchmidtData& sd) {
    std::vector<double> amps = reconstruct_amplitudes(sd);
    for (double& a : amps) {
        if (a < 0.0) {
            if (a < -1e-10) throw std::invalid_argument("reconstruct_state: negative amplitude " + std::to_string(a));
            a = 0.0;
        }
    }
    return PureState(sd.x_alphabet, sd.y_alphabet, std::move(amps));
}

double von_neumann_entropy(const DensityMatrix& rho) {
    const auto eig = linalg::sym_eigen(rho.matrix());
    double h = 0.0;
    for (double l : eig.eigenvalues) {
        if (l > kEntropyCutoff) h -= l * std::log(l);
    }
    return h;
}

double entanglement_entropy(const PureState& psi) {
    const SchmidtData sd = schmidt(psi);
    double h = 0.0;
    for (double s : sd.coefficients) {
        const double l = s * s;
        if (l > kEntropyCutoff) h -= l * std::log(l);
    }
    return h;
}

}  // namespace qdensity
