#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nkamg/dense.hpp"
#include "nkamg/nearkernel.hpp"
#include "nkamg/sparse.hpp"

namespace nkamg {

/// A stationary relaxation x <- x + B (b - A x) for a fixed linear B.
/// smooth() applies B, smooth_adjoint() applies B^T.
class Smoother {
public:
    virtual ~Smoother() = default;
    virtual void smooth(const SparseMatrix& a, std::span<double> x, std::span<const double> b) const = 0;
    virtual void smooth_adjoint(const SparseMatrix& a, std::span<double> x,
                                std::span<const double> b) const = 0;
    virtual std::string name() const = 0;
    virtual std::size_t size() const = 0;
};

using SmootherPtr = std::shared_ptr<const Smoother>;

enum class Sweep { forward, backward };

SmootherPtr l1jacobi(const SparseMatrix& a, double omega = 0.5);
SmootherPtr gauss_seidel(const SparseMatrix& a, Sweep dir = Sweep::forward);
/// x <- x + N g, g from one Gauss-Seidel sweep on (N^T A N) g = N^T r starting at zero.
SmootherPtr distributive(const SparseMatrix& a, const SparseMatrix& n, Sweep dir = Sweep::forward);
SmootherPtr distributive(const SparseMatrix& a, const NearKernelSet& nk, Sweep dir = Sweep::forward);
/// Exact patch solves applied one after another in the given order.
SmootherPtr schwarz_multiplicative(const SparseMatrix& a, std::vector<IndexSet> patches);
SmootherPtr composite(std::vector<SmootherPtr> parts);
/// s followed by its adjoint; B of the result is symmetric.
SmootherPtr symmetrize(SmootherPtr s);
/// The adjoint sweep of s (reverse order, transposed direction).
SmootherPtr adjoint(SmootherPtr s);

/// x' = x + B (b - A x).
Vector apply(const Smoother& s, const SparseMatrix& a, std::span<const double> x,
             std::span<const double> b);
/// B r, i.e. one application from a zero initial guess.
Vector apply_inverse(const Smoother& s, const SparseMatrix& a, std::span<const double> r);

/// One patch per column of g: the DoFs of that column's nonzeros followed by offset + column.
/// On the MAC grid with offset = number of velocities these are the pressure-centered stars.
std::vector<IndexSet> star_patches(const SparseMatrix& g, std::size_t offset);

/// Dense error propagator I - B A obtained by smoothing every unit vector (small sizes only).
DenseMatrix error_propagator(const Smoother& s, const SparseMatrix& a, bool adjoint = false);

} // namespace nkamg
