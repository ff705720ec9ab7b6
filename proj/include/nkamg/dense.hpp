#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nkamg/error.hpp"
#include "nkamg/sparse.hpp"

namespace nkamg {

/// Row-major dense matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t nrows, std::size_t ncols, double fill = 0.0)
        : nrows_(nrows), ncols_(ncols), vals_(nrows * ncols, fill) {}
    DenseMatrix(std::size_t nrows, std::size_t ncols, std::vector<double> values);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix from_sparse(const SparseMatrix& a);
    /// Principal submatrix a(idx, idx).
    static DenseMatrix principal(const SparseMatrix& a, std::span<const std::size_t> idx);

    std::size_t nrows() const { return nrows_; }
    std::size_t ncols() const { return ncols_; }
    double& operator()(std::size_t i, std::size_t j) { return vals_[i * ncols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return vals_[i * ncols_ + j]; }
    std::span<const double> values() const { return vals_; }
    std::span<double> values_mut() { return vals_; }

    DenseMatrix transpose() const;
    double frobenius_norm() const;
    Vector column(std::size_t j) const;
    void set_column(std::size_t j, std::span<const double> v);

private:
    std::size_t nrows_ = 0;
    std::size_t ncols_ = 0;
    std::vector<double> vals_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
Vector matvec(const DenseMatrix& a, std::span<const double> x);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
bool is_symmetric(const DenseMatrix& a, double rtol);

struct EigenPair {
    double lambda = 0.0;
    Vector vector;
};

/// Thrown when the eigensolver misses its residual target; carries the best iterate.
class EigenConvergenceError : public ConvergenceError {
public:
    EigenConvergenceError(const std::string& what, EigenPair best)
        : ConvergenceError(what), best(std::move(best)) {}
    EigenPair best;
};

/// All eigenvalues (ascending) and eigenvectors (columns) by cyclic Jacobi.
struct SymmetricEigen {
    Vector values;
    DenseMatrix vectors;
};
SymmetricEigen symmetric_eigen(const DenseMatrix& b);

/// Algebraically smallest eigenpair with ||Bv - lambda v|| <= tol * ||B||_F.
EigenPair smallest_eigpair(const DenseMatrix& b, double tol = 1e-12);

/// Bunch-Kaufman symmetric-indefinite factorization P B P^T = L D L^T.
class LdltFactor {
public:
    LdltFactor() = default;
    /// With allow_singular, pivot columns below the singularity threshold are dropped:
    /// the corresponding solution entries are set to zero instead of throwing.
    explicit LdltFactor(const DenseMatrix& b, bool allow_singular = false);

    std::size_t size() const { return n_; }
    std::size_t dropped_pivots() const { return dropped_; }
    /// Null vectors P^T L^{-T} e_k for each dropped pivot k.
    std::vector<Vector> null_vectors() const;
    Vector solve(std::span<const double> rhs) const;
    void solve_in_place(std::span<double> x) const;

private:
    std::size_t n_ = 0;
    std::size_t dropped_ = 0;
    DenseMatrix l_;                  // unit lower triangular, stored below the diagonal
    std::vector<double> d_diag_;     // D diagonal
    std::vector<double> d_sub_;      // D subdiagonal (nonzero at 2x2 pivots)
    std::vector<std::size_t> perm_;  // row k of the factored matrix is row perm_[k] of B
};

Vector dense_factor_solve(const DenseMatrix& b, std::span<const double> rhs);

} // namespace nkamg
