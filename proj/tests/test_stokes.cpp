#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "nkamg/stokes.hpp"

using namespace nkamg;

namespace {

StokesOptions absolute_split() {
    StokesOptions o;
    o.split_mode = StrengthMode::absolute;
    return o;
}

double stokes_rate(const ProblemInstance& p, const SparseMatrix& prol) {
    const Vector b = project_out(random_vector(p.size(), 7), p.nullspace);
    return measure_rate(stokes_hierarchy(p, prol), b).asymptotic_rate;
}

} // namespace

TEST_CASE("block interpolation counts and structure") {
    const auto p = stokes_mac_periodic(4, 4);
    const auto s = stokes_block_interpolation(p, absolute_split());
    CHECK(s.P_N.P.ncols() == s.split.coarse.size());
    CHECK(s.P_e.P.ncols() == s.P_e.basis.paths.size());
    const std::size_t ncv = s.P_e.P.ncols();
    for (std::size_t r = s.num_velocity; r < p.size(); ++r)
        for (std::size_t c : s.block_P.row_cols(r)) CHECK(c >= ncv);
    for (std::size_t r = 0; r < s.num_velocity; ++r)
        for (std::size_t c : s.block_P.row_cols(r)) CHECK(c < ncv);
}

TEST_CASE("velocity paths preserve the pressure-star near-kernel") {
    const auto p = stokes_mac_periodic(8, 8);
    const auto s = stokes_block_interpolation(p, absolute_split());
    const auto& b = s.P_e.basis;
    CHECK(max_abs(multiply(b.R, b.S)) == 0.0);
    CHECK(testutil::max_abs_diff(multiply(b.R, b.R.transpose()), SparseMatrix::identity(b.num_coarse())) <= 1e-14);
    CHECK(testutil::max_abs_diff(multiply(b.R, s.P_e.P), SparseMatrix::identity(b.num_coarse())) <= 1e-10);
}

TEST_CASE("global ideal interpolation contracts") {
    const auto p = stokes_mac_periodic(4, 4);
    const auto s = stokes_block_interpolation(p, absolute_split());
    const auto r = block2x2(s.P_e.basis.R, SparseMatrix(s.P_e.basis.R.nrows(), s.num_pressure),
                            SparseMatrix(s.P_N.basis.R.nrows(), s.num_velocity), s.P_N.basis.R);
    const std::size_t nc = r.nrows();
    CHECK(testutil::max_abs_diff(multiply(r, r.transpose()), SparseMatrix::identity(nc)) <= 1e-14);
    const auto g = stokes_global_ideal(s);
    CHECK(testutil::max_abs_diff(multiply(r, g), SparseMatrix::identity(nc)) <= 1e-9);
}

TEST_CASE("block interpolation rate is uniform in the mesh size") {
    double lo = 1.0, hi = 0.0;
    for (std::size_t n : {8, 16, 32}) {
        const auto p = stokes_mac_periodic(n, n);
        const double rate = stokes_rate(p, stokes_block_interpolation(p, absolute_split()).block_P);
        CHECK(rate < 1.0);
        lo = std::min(lo, rate);
        hi = std::max(hi, rate);
    }
    CHECK(hi - lo <= 0.1);
}

TEST_CASE("global and block interpolation agree on the coarsest mesh") {
    const auto p = stokes_mac_periodic(8, 8);
    const auto s = stokes_block_interpolation(p, absolute_split());
    const double block = stokes_rate(p, s.block_P);
    const double global = stokes_rate(p, stokes_global_ideal(s));
    CHECK(global < 1.0);
    CHECK(std::abs(global - block) <= 0.1);
}

TEST_CASE("sparse variants") {
    const auto p = stokes_mac_periodic(16, 16);
    const auto s0 = stokes_sparse_variants(p, false, 0);
    const auto s1 = stokes_sparse_variants(p, false, 1);
    const auto d0 = stokes_sparse_variants(p, true, 0);
    const auto d1 = stokes_sparse_variants(p, true, 1);
    CHECK(s0.variant == "no_P_smooth");
    CHECK(d1.variant == "diagonal_P_smooth");
    const auto h0 = stokes_hierarchy(p, s0.block_P);
    CHECK(operator_complexity(p.A, h0.A_c) == doctest::Approx(1.58).epsilon(0.15 / 1.58));
    const double c0 = operator_complexity(p.A, h0.A_c);
    const double c1 = operator_complexity(p.A, stokes_hierarchy(p, s1.block_P).A_c);
    const double cd0 = operator_complexity(p.A, stokes_hierarchy(p, d0.block_P).A_c);
    const double cd1 = operator_complexity(p.A, stokes_hierarchy(p, d1.block_P).A_c);
    CHECK(c0 < c1);
    CHECK(cd0 < cd1);
    CHECK(c0 < cd0);
    CHECK(c1 < cd1);
    // diagonal rows keep every velocity on the coarse grid
    CHECK(d0.P_e.P.ncols() == s0.num_velocity);
    // smoothing improves the tentative interpolation
    CHECK(stokes_rate(p, s1.block_P) < stokes_rate(p, s0.block_P));
    CHECK(stokes_rate(p, d1.block_P) < stokes_rate(p, d0.block_P));
    CHECK_THROWS_AS(stokes_sparse_variants(p, false, 2), Error);
}

TEST_CASE("vanka patches cover every DoF") {
    const auto p = stokes_mac_periodic(4, 4);
    const auto patches = vanka_patches(p);
    CHECK(patches.size() == 16);
    std::vector<int> seen(p.size(), 0);
    for (const auto& pt : patches) {
        CHECK(pt.size() == 5);
        for (auto i : pt) seen[i] = 1;
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }));
}

TEST_CASE("power_estimate approaches the largest eigenvalue") {
    const auto a = testutil::laplacian1d(10);
    const double top = 2.0 - 2.0 * std::cos(10.0 * M_PI / 11.0);
    const double est = power_estimate(a, 200);
    CHECK(est <= top + 1e-12);
    CHECK(est >= 0.95 * top);
}

TEST_CASE("tentative coarse correction keeps divergence-free errors divergence free") {
    const std::size_t n = 8;
    const auto p = stokes_mac_periodic(n, n);
    const double h = p.mesh.h;
    const auto s = stokes_sparse_variants(p, false, 0);
    const Vector psi = random_vector(n * n, 21);
    auto ps = [&](std::size_t i, std::size_t j) { return psi[(i % n) + n * (j % n)]; };
    Vector x(p.size(), 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            x[i + n * j] = (ps(i, j + 1) - ps(i, j)) / h;
            x[n * n + i + n * j] = -(ps(i + 1, j) - ps(i, j)) / h;
        }
    const auto h0 = build_hierarchy(p.A, s.block_P, nullptr, nullptr, p.nullspace);
    const Vector zero(p.size(), 0.0);
    twogrid_cycle(h0, x, zero);
    for (std::size_t k = s.num_velocity; k < p.size(); ++k) x[k] = 0.0;
    const Vector r = spmv(p.A, x);
    double div = 0.0;
    for (std::size_t k = s.num_velocity; k < p.size(); ++k) div = std::max(div, std::abs(r[k]));
    CHECK(div <= 1e-8);
}

TEST_CASE("restricted gradients are coarse gradients") {
    // each row of R G is nonzero only at the two coarse end nodes of its path
    const auto p = stokes_mac_periodic(16, 16);
    const auto s = stokes_sparse_variants(p, false, 0);
    const auto rg = multiply(s.P_e.basis.R, p.G);
    const double scale = max_abs(p.G);
    std::vector<bool> coarse(s.num_pressure, false);
    for (std::size_t c : s.split.coarse) coarse[c] = true;
    for (std::size_t r = 0; r < rg.nrows(); ++r) {
        std::size_t nz = 0;
        double sum = 0.0;
        for (std::size_t k = 0; k < rg.row_cols(r).size(); ++k) {
            if (std::abs(rg.row_vals(r)[k]) <= 1e-12 * scale) continue;
            ++nz;
            sum += rg.row_vals(r)[k];
            CHECK(coarse[rg.row_cols(r)[k]]);
        }
        CHECK(nz == 2);
        CHECK(std::abs(sum) <= 1e-12 * scale);
    }
}
