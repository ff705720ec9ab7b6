#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nkamg/dense.hpp"
#include "nkamg/sparse.hpp"

namespace nkamg {

/// Direct solver for symmetric sparse matrices: the pattern graph is split into
/// connected components and each component gets a dense Bunch-Kaufman factorization.
/// Suited to the block-local systems met here (fine-fine blocks, coarse operators).
class SparseFactor {
public:
    SparseFactor() = default;
    explicit SparseFactor(const SparseMatrix& a, bool allow_singular = false);

    std::size_t size() const { return n_; }
    std::size_t num_components() const { return components_.size(); }
    std::size_t largest_component() const;
    std::size_t dropped_pivots() const;
    /// Null vectors of the dropped pivots, scattered to full length.
    std::vector<Vector> null_vectors() const;

    Vector solve(std::span<const double> rhs) const;
    void solve_in_place(std::span<double> x) const;

private:
    std::size_t n_ = 0;
    std::vector<std::vector<std::size_t>> components_;
    std::vector<LdltFactor> factors_;
};

/// Connected components of the symmetric pattern graph, each sorted, ordered by smallest member.
std::vector<std::vector<std::size_t>> connected_components(const SparseMatrix& a);

/// Solves A x = rhs to relative residual tol, with iterative refinement after the factorization.
Vector sparse_solve(const SparseMatrix& a, std::span<const double> rhs, double tol = 1e-12);

/// Same, reusing a factorization of a.
Vector refined_solve(const SparseMatrix& a, const SparseFactor& f, std::span<const double> rhs,
                     double tol);

} // namespace nkamg
