#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nkamg/error.hpp"

namespace nkamg {

using Vector = std::vector<double>;

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Compressed sparse-row matrix of doubles.
///
/// Within each row the column indices are strictly increasing. Explicitly
/// stored zeros are kept; nothing in this library drops entries implicitly.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(std::size_t nrows, std::size_t ncols);
    /// Takes ownership of CSR arrays; throws if they violate the CSR invariants.
    SparseMatrix(std::size_t nrows, std::size_t ncols, std::vector<std::size_t> row_offsets,
                 std::vector<std::size_t> col_indices, std::vector<double> values);

    /// Duplicate (row, col) pairs are summed in input order.
    static SparseMatrix from_triplets(std::size_t nrows, std::size_t ncols,
                                      std::span<const Triplet> triplets);
    static SparseMatrix identity(std::size_t n);
    static SparseMatrix diagonal(std::span<const double> d);

    std::size_t nrows() const { return nrows_; }
    std::size_t ncols() const { return ncols_; }
    std::size_t nnz() const { return cols_.size(); }

    std::span<const std::size_t> row_offsets() const { return offsets_; }
    std::span<const std::size_t> col_indices() const { return cols_; }
    std::span<const double> values() const { return vals_; }
    std::span<double> values_mut() { return vals_; }

    std::span<const std::size_t> row_cols(std::size_t i) const {
        return {cols_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    std::span<const double> row_vals(std::size_t i) const {
        return {vals_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }

    /// Entry (i, j), zero when not stored.
    double at(std::size_t i, std::size_t j) const;
    bool contains(std::size_t i, std::size_t j) const;

    SparseMatrix transpose() const;
    Vector diagonal_values() const;

private:
    void validate() const;

    std::size_t nrows_ = 0;
    std::size_t ncols_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::size_t> cols_;
    std::vector<double> vals_;
};

/// OpenMP row-parallel kernels. Every row is evaluated in the same order as
/// the serial reference, so results are bit-identical for any thread count.
Vector spmv(const SparseMatrix& a, std::span<const double> x);
void spmv_into(const SparseMatrix& a, std::span<const double> x, std::span<double> y);
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix sptriple(const SparseMatrix& r, const SparseMatrix& a, const SparseMatrix& p);

/// Serial reference implementations, kept for testing the parallel kernels.
namespace serial {
Vector spmv(const SparseMatrix& a, std::span<const double> x);
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix sptriple(const SparseMatrix& r, const SparseMatrix& a, const SparseMatrix& p);
} // namespace serial

/// alpha*A + beta*B on the union pattern.
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0,
                 double beta = 1.0);
SparseMatrix scaled(const SparseMatrix& a, double alpha);

/// Copy without entries whose magnitude is below threshold.
SparseMatrix drop_small(const SparseMatrix& a, double threshold);
/// Number of entries with |a_ij| >= rel * max|a|.
std::size_t count_significant(const SparseMatrix& a, double rel);

double max_abs(const SparseMatrix& a);
double frobenius_norm(const SparseMatrix& a);
/// max |a_ij - a_ji| <= rtol * max|a|.
bool is_symmetric(const SparseMatrix& a, double rtol);

/// Select rows / columns by index list (in the given order).
SparseMatrix select_rows(const SparseMatrix& a, std::span<const std::size_t> rows);
SparseMatrix select_columns(const SparseMatrix& a, std::span<const std::size_t> cols);

/// [[a, b], [c, d]]; empty (0x0) blocks are treated as zero of matching size.
SparseMatrix block2x2(const SparseMatrix& a, const SparseMatrix& b, const SparseMatrix& c,
                      const SparseMatrix& d);

/// Symmetric adjacency lists of the pattern of a square matrix, diagonal excluded.
std::vector<std::vector<std::size_t>> pattern_graph(const SparseMatrix& a);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

} // namespace nkamg
