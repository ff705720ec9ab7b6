#pragma once

#include <cmath>
#include <vector>

#include "nkamg/dense.hpp"
#include "nkamg/rng.hpp"
#include "nkamg/sparse.hpp"

namespace testutil {

using namespace nkamg;

inline SparseMatrix laplacian1d(std::size_t n) {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n; ++i) {
        t.push_back({i, i, 2.0});
        if (i > 0) t.push_back({i, i - 1, -1.0});
        if (i + 1 < n) t.push_back({i, i + 1, -1.0});
    }
    return SparseMatrix::from_triplets(n, n, t);
}

/// Graph Laplacian of the path 0-1-...-(n-1); singular with the constant nullspace.
inline SparseMatrix path_graph(std::size_t n) {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n; ++i) {
        t.push_back({i, i, (i == 0 || i + 1 == n) ? 1.0 : 2.0});
        if (i + 1 < n) {
            t.push_back({i, i + 1, -1.0});
            t.push_back({i + 1, i, -1.0});
        }
    }
    return SparseMatrix::from_triplets(n, n, t);
}

/// Periodic 5-point node Laplacian with node (x, y) -> x + nx*y.
inline SparseMatrix periodic_laplacian(std::size_t nx, std::size_t ny) {
    std::vector<Triplet> t;
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t x = 0; x < nx; ++x) {
            const std::size_t i = x + nx * y;
            t.push_back({i, i, 4.0});
            t.push_back({i, (x + 1) % nx + nx * y, -1.0});
            t.push_back({i, (x + nx - 1) % nx + nx * y, -1.0});
            t.push_back({i, x + nx * ((y + 1) % ny), -1.0});
            t.push_back({i, x + nx * ((y + ny - 1) % ny), -1.0});
        }
    return SparseMatrix::from_triplets(nx * ny, nx * ny, t);
}

/// Random symmetric positive definite matrix Q^T Q + n I with a sparse-ish pattern.
inline SparseMatrix random_spd(std::size_t n, std::uint64_t seed, double density = 0.4) {
    Lcg g(seed);
    DenseMatrix q(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i == j || g.uniform() < density) q(i, j) = g.symmetric();
    DenseMatrix a = q.transpose() * q;
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double v = a(i, j) + (i == j ? 0.5 * static_cast<double>(n) : 0.0);
            if (v != 0.0) t.push_back({i, j, v});
        }
    return SparseMatrix::from_triplets(n, n, t);
}

inline double max_abs_diff(const SparseMatrix& a, const SparseMatrix& b) {
    return nkamg::max_abs_diff(DenseMatrix::from_sparse(a), DenseMatrix::from_sparse(b));
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Dense inverse via Gauss-Jordan with partial pivoting (independent of the LDL^T code).
inline DenseMatrix gauss_jordan_inverse(DenseMatrix a) {
    const std::size_t n = a.nrows();
    DenseMatrix inv = DenseMatrix::identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
        for (std::size_t j = 0; j < n; ++j) {
            std::swap(a(c, j), a(p, j));
            std::swap(inv(c, j), inv(p, j));
        }
        const double d = a(c, c);
        for (std::size_t j = 0; j < n; ++j) {
            a(c, j) /= d;
            inv(c, j) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a(r, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a(r, j) -= f * a(c, j);
                inv(r, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

/// Numerical rank from the eigenvalues of a symmetric matrix.
inline std::size_t symmetric_rank(const DenseMatrix& a, double rel = 1e-10) {
    const auto e = symmetric_eigen(a);
    double mx = 0.0;
    for (double v : e.values) mx = std::max(mx, std::abs(v));
    std::size_t r = 0;
    for (double v : e.values)
        if (std::abs(v) > rel * mx) ++r;
    return r;
}

inline double a_norm(const SparseMatrix& a, const Vector& v) {
    return std::sqrt(std::max(0.0, dot(v, spmv(a, v))));
}

} // namespace testutil
