#include "qdensity/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qdensity::linalg {

namespace {

// Coordinates smaller than this are skipped when locating the "first
// nonzero" entry that fixes an eigenvector's sign.
constexpr double kSignThreshold = 1e-12;
constexpr int kMaxSweeps = 100;

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()) + ")");
    }
}

// Flip column c of `primary` (and of `partner`, if given) so the first
// coordinate of primary's column with magnitude above kSignThreshold is positive.
void fix_sign(Matrix& primary, std::size_t c, Matrix* partner) {
    for (std::size_t r = 0; r < primary.rows(); ++r) {
        const double x = primary(r, c);
        if (std::abs(x) > kSignThreshold) {
            if (x < 0) {
                for (std::size_t k = 0; k < primary.rows(); ++k) primary(k, c) = -primary(k, c);
                if (partner != nullptr) {
                    for (std::size_t k = 0; k < partner->rows(); ++k) (*partner)(k, c) = -(*partner)(k, c);
                }
            }
            return;
        }
    }
}

bool lex_greater(const Matrix& m, std::size_t a, std::size_t b) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double x = m(r, a);
        const double y = m(r, b);
        if (std::abs(x - y) > kSignThreshold) return x > y;
    }
    return false;
}

// Permutation that sorts `values` descending, with runs of near-equal values
// ordered by lexicographically greatest column of `vectors`.
std::vector<std::size_t> spectral_order(const std::vector<double>& values, const Matrix& vectors) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::size_t start = 0;
    while (start < order.size()) {
        std::size_t end = start + 1;
        while (end < order.size() && values[order[end - 1]] - values[order[end]] < kTieTolerance) ++end;
        std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](std::size_t a, std::size_t b) { return lex_greater(vectors, a, b); });
        start = end;
    }
    return order;
}

Matrix permute_columns(const Matrix& m, const std::vector<std::size_t>& order) {
    Matrix out(m.rows(), order.size());
    for (std::size_t c = 0; c < order.size(); ++c) {
        for (std::size_t r = 0; r < m.rows(); ++r) out(r, c) = m(r, order[c]);
    }
    return out;
}

struct RawSvd {
    Matrix u;
    std::vector<double> s;
    Matrix v;
};

// One-sided (Hestenes) Jacobi on the columns of a tall matrix (rows >= cols).
RawSvd one_sided_jacobi(const Matrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    Matrix u = a;
    Matrix v = Matrix::identity(n);
    constexpr double eps = 1e-15;

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += u(i, p) * u(i, p);
                    beta += u(i, q) * u(i, q);
                    gamma += u(i, p) * u(i, q);
                }
                if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double up = u(i, p);
                    const double uq = u(i, q);
                    u(i, p) = c * up - s * uq;
                    u(i, q) = s * up + c * uq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = v(i, p);
                    const double vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
                rotated = true;
            }
        }
        if (!rotated) break;
    }

    std::vector<double> s(n);
    std::vector<bool> filled(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        double norm = 0.0;
        for (std::size_t i = 0; i < m; ++i) norm += u(i, j) * u(i, j);
        norm = std::sqrt(norm);
        s[j] = norm;
        if (norm > 0.0) {
            for (std::size_t i = 0; i < m; ++i) u(i, j) /= norm;
            filled[j] = true;
        }
    }

    // Columns with an exactly zero singular value still need an orthonormal
    // left vector; take the first standard basis vector that survives
    // Gram-Schmidt against the columns already in place.
    for (std::size_t j = 0; j < n; ++j) {
        if (filled[j]) continue;
        for (std::size_t e = 0; e < m; ++e) {
            std::vector<double> cand(m, 0.0);
            cand[e] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t k = 0; k < n; ++k) {
                    if (!filled[k]) continue;
                    double dot = 0.0;
                    for (std::size_t i = 0; i < m; ++i) dot += cand[i] * u(i, k);
                    for (std::size_t i = 0; i < m; ++i) cand[i] -= dot * u(i, k);
                }
            }
            double norm = 0.0;
            for (double x : cand) norm += x * x;
            norm = std::sqrt(norm);
            if (norm > 0.5) {
                for (std::size_t i = 0; i < m; ++i) u(i, j) = cand[i] / norm;
                filled[j] = true;
                break;
            }
        }
    }
    return {std::move(u), std::move(s), std::move(v)};
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) {
        throw DimensionError("Matrix: expected " + std::to_string(rows_ * cols_) + " entries, got " +
                             std::to_string(entries_.size()));
    }
    for (double x : entries_) {
        if (!std::isfinite(x)) throw std::invalid_argument("Matrix: non-finite entry");
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("Matrix: ragged initializer");
        entries_.insert(entries_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
    Matrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

std::vector<double> Matrix::row(std::size_t r) const {
    return {entries_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
            entries_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)};
}

std::vector<double> Matrix::diagonal_entries() const {
    const std::size_t n = std::min(rows_, cols_);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = (*this)(i, i);
    return out;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    }
    return t;
}

double Matrix::trace() const {
    if (!is_square()) throw DimensionError("trace of non-square matrix");
    double t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    require_same_shape(*this, other, "operator+");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    require_same_shape(*this, other, "operator-");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& x : entries_) x *= s;
    return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matrix product: inner dimensions " + std::to_string(a.cols()) + " and " +
                             std::to_string(b.rows()) + " differ");
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

std::vector<double> operator*(const Matrix& m, std::span<const double> v) {
    if (m.cols() != v.size()) throw DimensionError("matrix-vector product: size mismatch");
    std::vector<double> out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "max_abs_diff");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i) {
        worst = std::max(worst, std::abs(a.entries()[i] - b.entries()[i]));
    }
    return worst;
}

double max_abs(const Matrix& m) {
    double worst = 0.0;
    for (double x : m.entries()) worst = std::max(worst, std::abs(x));
    return worst;
}

bool is_symmetric(const Matrix& m, double tol) {
    if (!m.is_square()) return false;
    const double scale = std::max(1.0, max_abs(m));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = i + 1; j < m.cols(); ++j) {
            if (std::abs(m(i, j) - m(j, i)) > tol * scale) return false;
        }
    }
    return true;
}

Matrix outer(std::span<const double> v, std::span<const double> w) {
    Matrix out(v.size(), w.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0.0) continue;
        for (std::size_t j = 0; j < w.size(); ++j) out(i, j) = v[i] * w[j];
    }
    return out;
}

Matrix gram(const Matrix& m) {
    Matrix out(m.cols(), m.cols());
    for (std::size_t i = 0; i < m.cols(); ++i) {
        for (std::size_t j = i; j < m.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t r = 0; r < m.rows(); ++r) acc += m(r, i) * m(r, j);
            out(i, j) = acc;
            out(j, i) = acc;
        }
    }
    return out;
}

Matrix cogram(const Matrix& m) {
    Matrix out(m.rows(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = i; j < m.rows(); ++j) {
            double acc = 0.0;
            for (std::size_t c = 0; c < m.cols(); ++c) acc += m(i, c) * m(j, c);
            out(i, j) = acc;
            out(j, i) = acc;
        }
    }
    return out;
}

SymEigen sym_eigen(const Matrix& m) {
    if (!m.is_square()) {
        throw DimensionError("sym_eigen: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    if (!is_symmetric(m, 1e-12)) throw SymmetryError("sym_eigen: matrix is not symmetric");

    const std::size_t n = m.rows();
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
    }
    Matrix v = Matrix::identity(n);

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        }
        if (off == 0.0) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double g = 100.0 * std::abs(apq);
                // After a few sweeps an off-diagonal entry that no longer
                // perturbs either diagonal entry is dropped.
                if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
                    std::abs(a(q, q)) + g == std::abs(a(q, q))) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
                const double c = 1.0 / std::hypot(t, 1.0);
                const double s = t * c;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = a(p, r) = c * arp - s * arq;
                    a(r, q) = a(q, r) = s * arp + c * arq;
                }
                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    const double vrp = v(r, p);
                    const double vrq = v(r, q);
                    v(r, p) = c * vrp - s * vrq;
                    v(r, q) = s * vrp + c * vrq;
                }
            }
        }
    }

    std::vector<double> values = a.diagonal_entries();
    for (std::size_t c = 0; c < n; ++c) fix_sign(v, c, nullptr);
    const auto order = spectral_order(values, v);

    SymEigen out;
    out.eigenvalues.reserve(n);
    for (std::size_t k : order) out.eigenvalues.push_back(values[k]);
    out.eigenvectors = permute_columns(v, order);
    return out;
}

Svd svd(const Matrix& m) {
    if (m.empty()) throw DimensionError("svd: empty matrix");
    for (double x : m.entries()) {
        if (!std::isfinite(x)) throw std::invalid_argument("svd: non-finite entry");
    }

    RawSvd raw;
    if (m.rows() >= m.cols()) {
        raw = one_sided_jacobi(m);
    } else {
        RawSvd t = one_sided_jacobi(m.transpose());
        raw = {std::move(t.v), std::move(t.s), std::move(t.u)};
    }

    for (std::size_t c = 0; c < raw.s.size(); ++c) fix_sign(raw.v, c, &raw.u);
    const auto order = spectral_order(raw.s, raw.v);

    Svd out;
    out.u = permute_columns(raw.u, order);
    out.v = permute_columns(raw.v, order);
    out.singular_values.reserve(order.size());
    for (std::size_t k : order) out.singular_values.push_back(raw.s[k]);
    return out;
}

double min_eigenvalue(const Matrix& m) {
    const auto eig = sym_eigen(m);
    return eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.back();
}

bool is_psd(const Matrix& m, double tol) { return min_eigenvalue(m) >= -tol; }

Matrix reshape_vector_to_matrix(std::span<const double> v, std::size_t rows, std::size_t cols, Layout layout) {
    if (v.size() != rows * cols) {
        throw DimensionError("reshape: vector of length " + std::to_string(v.size()) + " cannot fill " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    }
    switch (layout) {
        case Layout::suffix_major:
            return Matrix(rows, cols, std::vector<double>(v.begin(), v.end()));
    }
    throw std::logic_error("reshape: unknown layout");
}

std::vector<double> reshape_matrix_to_vector(const Matrix& m, Layout layout) {
    switch (layout) {
        case Layout::suffix_major:
            return {m.entries().begin(), m.entries().end()};
    }
    throw std::logic_error("reshape: unknown layout");
}

std::string to_string(const Matrix& m) {
    std::ostringstream os;
    os.precision(6);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        os << (r == 0 ? "[[" : " [");
        for (std::size_t c = 0; c < m.cols(); ++c) os << (c ? ", " : "") << m(r, c);
        os << (r + 1 == m.rows() ? "]]" : "]\n");
    }
    return os.str();
}

}  // namespace qdensity::linalg
