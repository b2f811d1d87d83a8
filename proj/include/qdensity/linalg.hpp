#pragma once

// Dense real linear algebra used throughout the library: a row-major Matrix,
// cyclic Jacobi eigensolver for symmetric matrices, one-sided Jacobi SVD and
// reshaping between state vectors and matrices.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdensity::linalg {

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SymmetryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> diag);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return entries_.empty(); }
    bool is_square() const { return rows_ == cols_; }

    double operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }

    std::span<const double> entries() const { return entries_; }
    std::span<double> entries() { return entries_; }

    std::vector<double> column(std::size_t c) const;
    std::vector<double> row(std::size_t r) const;
    std::vector<double> diagonal_entries() const;

    Matrix transpose() const;
    double trace() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }
    friend Matrix operator*(const Matrix& a, const Matrix& b);

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> entries_;
};

std::vector<double> operator*(const Matrix& m, std::span<const double> v);

/// Largest absolute entrywise difference. Shapes must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs(const Matrix& m);

bool is_symmetric(const Matrix& m, double tol = 1e-12);

/// v·wᵀ
Matrix outer(std::span<const double> v, std::span<const double> w);

/// mᵀ·m
Matrix gram(const Matrix& m);

/// m·mᵀ
Matrix cogram(const Matrix& m);

struct SymEigen {
    std::vector<double> eigenvalues;  // descending
    Matrix eigenvectors;              // columns, aligned with eigenvalues
};

struct Svd {
    Matrix u;                            // rows x k, left singular vectors
    std::vector<double> singular_values; // k = min(rows, cols), descending
    Matrix v;                            // cols x k, right singular vectors
};

// Eigenvalues within this distance are treated as tied when ordering.
inline constexpr double kTieTolerance = 1e-9;

/// Symmetric eigendecomposition m = E·diag(λ)·Eᵀ.
///
/// Eigenvalues are strictly descending; ties (within kTieTolerance) are
/// ordered by the lexicographically greatest sign-fixed eigenvector. Each
/// eigenvector's first nonzero coordinate is positive. Throws DimensionError
/// for non-square input and SymmetryError when m is not symmetric to 1e-12.
SymEigen sym_eigen(const Matrix& m);

/// Trimmed SVD m = U·diag(s)·Vᵀ keeping min(rows, cols) triplets.
///
/// Each right singular vector's first nonzero coordinate is positive and the
/// paired left vector carries the matching sign.
Svd svd(const Matrix& m);

double min_eigenvalue(const Matrix& m);

/// True iff the smallest eigenvalue of the symmetric matrix m is >= -tol.
bool is_psd(const Matrix& m, double tol);

enum class Layout {
    // Entry (α, i) of the matrix holds the coefficient of basis pair
    // (x_i, y_α); in the flat vector that pair sits at α·cols + i.
    suffix_major,
};

Matrix reshape_vector_to_matrix(std::span<const double> v, std::size_t rows, std::size_t cols,
                                Layout layout = Layout::suffix_major);
std::vector<double> reshape_matrix_to_vector(const Matrix& m, Layout layout = Layout::suffix_major);

std::string to_string(const Matrix& m);

}  // namespace qdensity::linalg
