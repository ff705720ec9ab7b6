#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nkamg/coarsen.hpp"
#include "nkamg/factor.hpp"
#include "nkamg/smoothers.hpp"

namespace nkamg {

/// Exact solver for A_c, optionally restricted to the orthogonal complement of a known
/// kernel Y through the bordered system [[A_c, Y], [Y^T, 0]].
class CoarseSolver {
public:
    CoarseSolver() = default;
    CoarseSolver(const SparseMatrix& a_c, std::vector<Vector> kernel);

    Vector solve(std::span<const double> rhs) const;
    std::size_t kernel_dim() const { return kernel_.size(); }
    /// Null directions of A_c found beyond the supplied kernel.
    std::size_t extra_singular() const { return extra_; }

private:
    std::size_t n_ = 0;
    std::size_t extra_ = 0;
    std::vector<Vector> kernel_; // orthonormal
    SparseFactor factor_;
};

struct TwoGridHierarchy {
    SparseMatrix A;
    SparseMatrix P;
    SparseMatrix Pt;
    SparseMatrix A_c;
    CoarseSolver coarse;
    SmootherPtr pre;
    SmootherPtr post;
};

/// A_c = P^T A P and its factorization. Fine kernel vectors whose coarse least-squares
/// representation is annihilated by A_c are deflated from the coarse solve.
TwoGridHierarchy build_hierarchy(const SparseMatrix& a, const SparseMatrix& p, SmootherPtr pre, SmootherPtr post,
                                 const std::vector<Vector>& fine_kernel = {});

/// Pre-smooth, coarse correction, post-smooth (adjoint of post is not taken; pass the
/// smoother you want applied).
void twogrid_cycle(const TwoGridHierarchy& h, std::span<double> x, std::span<const double> b);

struct SolveReport {
    std::size_t iterations = 0;
    std::vector<double> residual_history;
    double asymptotic_rate = 0.0;
    bool converged = false;
    bool diverged = false;
};

/// Geometric mean of the last (up to) 5 residual ratios.
double tail_rate(const std::vector<double>& history);

/// Stationary two-grid iteration from zero until |r_k| <= tol |r_0|.
SolveReport measure_rate(const TwoGridHierarchy& h, std::span<const double> b, double tol = 1e-6,
                         std::size_t max_iter = 500);

SolveReport cg(const SparseMatrix& a, std::span<const double> b, double tol = 1e-6, std::size_t max_iter = 20000);
/// CG preconditioned by one two-grid cycle from a zero guess.
SolveReport pcg(const TwoGridHierarchy& h, std::span<const double> b, double tol = 1e-6,
                std::size_t max_iter = 1000);

/// b with its components along the given vectors removed (vectors need not be orthogonal).
Vector project_out(std::span<const double> b, const std::vector<Vector>& vecs);

/// Dense two-grid error propagator (small sizes only).
DenseMatrix twogrid_propagator(const TwoGridHierarchy& h);

} // namespace nkamg
