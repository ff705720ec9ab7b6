#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nkamg/discretize.hpp"
#include "nkamg/coarsen.hpp"

using namespace nkamg;

namespace {

// Bilinear edge basis on [0,h]^2 evaluated by 2x2 Gauss quadrature; exact for these degrees.
DenseMatrix quad_oracle(std::size_t nx, std::size_t ny, double beta) {
    const double h = 1.0 / static_cast<double>(nx);
    const std::size_t nn = nx * ny;
    DenseMatrix a(2 * nn, 2 * nn);
    const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t x = 0; x < nx; ++x) {
            const std::size_t e[4] = {x + nx * y, x + nx * ((y + 1) % ny), nn + x + nx * y,
                                      nn + (x + 1) % nx + nx * y};
            for (double xi : gp)
                for (double eta : gp) {
                    const double w = 0.25 * h * h;
                    // (phi_x, phi_y, curl) per local edge: bottom, top, left, right
                    const double phi[4][3] = {{(1 - eta) / h, 0, 1 / (h * h)},
                                              {eta / h, 0, -1 / (h * h)},
                                              {0, (1 - xi) / h, -1 / (h * h)},
                                              {0, xi / h, 1 / (h * h)}};
                    for (int p = 0; p < 4; ++p)
                        for (int q = 0; q < 4; ++q)
                            a(e[p], e[q]) += w * (phi[p][2] * phi[q][2]
                                                  + beta * (phi[p][0] * phi[q][0] + phi[p][1] * phi[q][1]));
                }
        }
    return a;
}

} // namespace

TEST_CASE("quad periodic: gradient lies in the curl kernel") {
    const auto p = curlcurl_quad_periodic(2, 2, 0.0);
    Vector e0(p.G.ncols(), 0.0);
    e0[0] = 1.0;
    const Vector g = spmv(p.G, e0);
    CHECK(norm2(spmv(p.stiffness, g)) <= 1e-12);
    CHECK(norm2(spmv(p.A, g)) <= 1e-12);
}

TEST_CASE("quad periodic matches an element quadrature oracle") {
    const auto p = curlcurl_quad_periodic(4, 4, 0.01);
    CHECK(p.size() == 32);
    CHECK(is_symmetric(p.A, 0.0));
    const auto ref = quad_oracle(4, 4, 0.01);
    CHECK(max_abs_diff(DenseMatrix::from_sparse(p.A), ref) <= 1e-12 * max_abs(p.A));
    // rows of the curl stiffness sum to zero along curl stencils: A_s G = 0
    CHECK(max_abs(multiply(p.stiffness, p.G)) <= 1e-12 * max_abs(p.stiffness));
}

TEST_CASE("quad periodic with beta = 1 is positive definite") {
    const auto p = curlcurl_quad_periodic(2, 2, 1.0);
    const auto ea = symmetric_eigen(DenseMatrix::from_sparse(p.A));
    const auto em = symmetric_eigen(DenseMatrix::from_sparse(p.mass));
    CHECK(ea.values.front() >= em.values.front() * 1.0 - 1e-12);
    CHECK(ea.values.front() > 0.0);
}

TEST_CASE("tri Dirichlet: interior gradients survive elimination") {
    const auto p = curlcurl_tri_dirichlet(2, 2, 0.01);
    CHECK(p.G.ncols() == 1);
    for (const auto& [a, b] : p.mesh.edge_endpoints) {
        const auto& ca = p.mesh.node_coords[a];
        const auto& cb = p.mesh.node_coords[b];
        const bool same_side = (ca[0] == cb[0] && (ca[0] == 0.0 || ca[0] == 1.0))
                               || (ca[1] == cb[1] && (ca[1] == 0.0 || ca[1] == 1.0));
        CHECK_FALSE(same_side);
    }
    const Vector g = spmv(p.G, Vector{1.0});
    CHECK(norm2(spmv(p.stiffness, g)) <= 1e-12 * norm2(g) * max_abs(p.stiffness));
}

TEST_CASE("tri Dirichlet DoF count matches a mesh enumeration") {
    for (std::size_t n : {3, 4}) {
        // all edges of the split-square mesh, then drop those lying on one boundary line
        std::size_t interior = 0;
        auto count = [&](double x0, double y0, double x1, double y1) {
            const bool on = (x0 == x1 && (x0 == 0 || x0 == n)) || (y0 == y1 && (y0 == 0 || y0 == n));
            if (!on) ++interior;
        };
        for (std::size_t y = 0; y <= n; ++y)
            for (std::size_t x = 0; x <= n; ++x) {
                if (x < n) count(x, y, x + 1, y);
                if (y < n) count(x, y, x, y + 1);
                if (x < n && y < n) count(x, y, x + 1, y + 1);
            }
        CHECK(curlcurl_tri_dirichlet(n, n, 0.01).size() == interior);
    }
    CHECK(curlcurl_tri_dirichlet(3, 3, 0.01).size() == 21);
}

TEST_CASE("tri Dirichlet with beta = 0 has nullity equal to the interior node count") {
    const auto p = curlcurl_tri_dirichlet(2, 2, 0.0);
    const auto d = DenseMatrix::from_sparse(p.A);
    CHECK(p.size() - testutil::symmetric_rank(d) == 1);
    const auto q = curlcurl_tri_dirichlet(3, 3, 0.0);
    CHECK(q.size() - testutil::symmetric_rank(DenseMatrix::from_sparse(q.A)) == 4);
}

TEST_CASE("tri element matrices are symmetric and positive semidefinite") {
    const auto p = curlcurl_tri_dirichlet(4, 4, 0.01);
    CHECK(is_symmetric(p.A, 1e-14));
    const auto e = symmetric_eigen(DenseMatrix::from_sparse(p.mass));
    CHECK(e.values.front() > 0.0);
}

TEST_CASE("MAC Stokes: coupling blocks are transposes") {
    const auto p = stokes_mac_periodic(2, 2);
    const std::size_t nv = p.G.nrows(), np = p.G.ncols();
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t j = 0; j < np; ++j) CHECK(p.A.at(i, nv + j) == p.A.at(nv + j, i));
}

TEST_CASE("MAC Stokes: constant pressure and constant velocities are in the kernel") {
    const auto p = stokes_mac_periodic(4, 4);
    CHECK(p.nullspace.size() == 3);
    for (const auto& z : p.nullspace) CHECK(norm2(spmv(p.A, z)) <= 1e-12);
    Vector cp(p.size(), 0.0);
    for (std::size_t k = p.G.nrows(); k < p.size(); ++k) cp[k] = 1.0;
    const Vector r = spmv(p.A, cp);
    CHECK(norm2(r) == 0.0);
}

TEST_CASE("MAC Stokes: discrete curls of a stream function are divergence free") {
    const std::size_t n = 4;
    const auto p = stokes_mac_periodic(n, n);
    const double h = p.mesh.h;
    const Vector psi = random_vector(n * n, 21); // at cell corners (i h, j h)
    auto ps = [&](std::size_t i, std::size_t j) { return psi[(i % n) + n * (j % n)]; };
    Vector x(p.size(), 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            x[i + n * j] = (ps(i, j + 1) - ps(i, j)) / h;
            x[n * n + i + n * j] = -(ps(i + 1, j) - ps(i, j)) / h;
        }
    const Vector r = spmv(p.A, x);
    for (std::size_t k = 2 * n * n; k < p.size(); ++k) CHECK(std::abs(r[k]) <= 1e-12 * norm2(x));
}

TEST_CASE("discrete_gradient examples") {
    MeshInfo m;
    m.node_coords = {{0, 0}, {1, 0}, {0, 1}};
    m.edge_endpoints = {{0, 1}};
    auto g = discrete_gradient(m);
    CHECK(g.at(0, 0) == -1.0);
    CHECK(g.at(0, 1) == 1.0);

    m.edge_endpoints = {{0, 1}, {1, 2}, {2, 0}};
    g = discrete_gradient(m);
    Vector loop(3, 1.0); // signed traversal 0->1->2->0
    const Vector s = spmv(g.transpose(), loop);
    for (double v : s) CHECK(v == 0.0);
}

TEST_CASE("G^T G equals the periodic 5-point node Laplacian") {
    for (std::size_t n : {2, 4}) {
        const auto p = curlcurl_quad_periodic(n, n, 0.01);
        const auto gtg = multiply(p.G.transpose(), p.G);
        CHECK(testutil::max_abs_diff(gtg, testutil::periodic_laplacian(n, n)) == 0.0);
    }
}

TEST_CASE("mesh constructors reject bad input") {
    CHECK_THROWS_AS(curlcurl_quad_periodic(1, 4, 0.01), Error);
    CHECK_THROWS_AS(curlcurl_quad_periodic(4, 4, -1.0), Error);
    CHECK_THROWS_AS(stokes_mac_periodic(1, 1), Error);
}

TEST_CASE("quad periodic stiffness is consistent under geometric refinement") {
    const auto fine = curlcurl_quad_periodic(8, 8, 0.0);
    const auto coarse = curlcurl_quad_periodic(4, 4, 0.0);
    const auto pg = nedelec_prolongation(fine.mesh);
    const auto galerkin = sptriple(pg.transpose(), fine.stiffness, pg);
    // find the scale from the largest entry, then compare entrywise
    const double s = max_abs(coarse.stiffness) / max_abs(galerkin);
    CHECK(testutil::max_abs_diff(scaled(galerkin, s), coarse.stiffness) <= 1e-12 * max_abs(coarse.stiffness));
}
