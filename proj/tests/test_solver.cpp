#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nkamg/experiment.hpp"
#include "nkamg/solver.hpp"

using namespace nkamg;

TEST_CASE("build_hierarchy examples") {
    const auto a = testutil::random_spd(5, 1);
    auto h = build_hierarchy(a, SparseMatrix::identity(5), nullptr, nullptr);
    CHECK(testutil::max_abs_diff(h.A_c, a) == 0.0);

    const Vector v = random_vector(5, 2);
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < 5; ++i) t.push_back({i, 0, v[i]});
    h = build_hierarchy(a, SparseMatrix::from_triplets(5, 1, t), nullptr, nullptr);
    CHECK(h.A_c.at(0, 0) == doctest::Approx(dot(v, spmv(a, v))));
}

TEST_CASE("coarse operator of the periodic quad pipeline") {
    const auto pl = build_curlcurl_pipeline(curlcurl_quad_periodic(4, 4, 0.01));
    const auto h = curlcurl_hierarchy(pl, pl.P.P, true);
    CHECK(h.A_c.nrows() == 8);
    CHECK(is_symmetric(h.A_c, 1e-12));
}

TEST_CASE("twogrid_cycle examples") {
    const auto a = testutil::random_spd(6, 3);
    const Vector xt = random_vector(6, 4);
    const Vector b = spmv(a, xt);
    const auto pl_s = gauss_seidel(a);
    const auto p = select_columns(SparseMatrix::identity(6), std::vector<std::size_t>{0, 2, 4});
    const auto h = build_hierarchy(a, p, pl_s, pl_s);
    Vector x = xt;
    twogrid_cycle(h, x, b);
    CHECK(testutil::max_abs_diff(x, xt) <= 1e-13);

    const auto exact = build_hierarchy(a, SparseMatrix::identity(6), nullptr, nullptr);
    Vector y(6, 0.0);
    twogrid_cycle(exact, y, b);
    CHECK(testutil::max_abs_diff(y, xt) <= 1e-12);
}

TEST_CASE("dense two-grid propagator matches the product formula") {
    const auto a = testutil::random_spd(6, 5);
    const auto p = select_columns(testutil::random_spd(6, 6, 0.3), std::vector<std::size_t>{1, 4});
    const auto s = gauss_seidel(a);
    const auto h = build_hierarchy(a, p, s, s);
    const auto ad = DenseMatrix::from_sparse(a), pd = DenseMatrix::from_sparse(p);
    const auto es = error_propagator(*s, a);
    const auto ac = pd.transpose() * ad * pd;
    const auto cgc = DenseMatrix::identity(6) - pd * testutil::gauss_jordan_inverse(ac) * pd.transpose() * ad;
    const auto ref = es * cgc * es;
    CHECK(max_abs_diff(twogrid_propagator(h), ref) <= 1e-11);
}

TEST_CASE("Galerkin coarse correction is an idempotent projection") {
    const auto pl = build_curlcurl_pipeline(curlcurl_quad_periodic(8, 8, 0.01));
    const auto h = build_hierarchy(pl.problem.A, pl.P.P, nullptr, nullptr);
    REQUIRE(pl.problem.size() <= 200);
    const auto t = twogrid_propagator(h);
    CHECK(max_abs_diff(t * t, t) <= 1e-10);
}

TEST_CASE("measure_rate with an exact cycle needs one iteration") {
    const auto a = testutil::random_spd(5, 7);
    const auto h = build_hierarchy(a, SparseMatrix::identity(5), nullptr, nullptr);
    const auto rep = measure_rate(h, random_vector(5, 8));
    CHECK(rep.iterations == 1);
    CHECK(rep.converged);
}

TEST_CASE("cg examples") {
    auto rep = cg(SparseMatrix::identity(4), Vector{1, 2, 3, 4});
    CHECK(rep.iterations == 1);
    rep = cg(testutil::laplacian1d(10), random_vector(10, 9), 1e-10);
    CHECK(rep.converged);
    CHECK(rep.iterations <= 10);
}

TEST_CASE("rates on the periodic quad mesh") {
    // classical ideal degrades with size while ours stays flat
    double prev = 0.0;
    for (std::size_t n : {4, 8, 16}) {
        const auto pl = build_curlcurl_pipeline(curlcurl_quad_periodic(n, n, 0.01));
        const Vector b = random_vector(pl.problem.size(), 7);
        const auto ours = measure_rate(curlcurl_hierarchy(pl, pl.P.P, true), b);
        const auto ci = measure_rate(curlcurl_hierarchy(pl, classical_ideal(pl.problem.A).P, true), b);
        CHECK(ours.asymptotic_rate < 0.7);
        CHECK(ci.asymptotic_rate > prev);
        prev = ci.asymptotic_rate;
    }
}

TEST_CASE("pcg beats cg on the triangle mesh") {
    const auto pl = build_curlcurl_pipeline(curlcurl_tri_dirichlet(8, 8, 0.01));
    const Vector b = random_vector(pl.problem.size(), 7);
    const auto p = pcg(curlcurl_hierarchy(pl, pl.P.P, true), b);
    const auto c = cg(pl.problem.A, b);
    CHECK(p.converged);
    CHECK(p.iterations < c.iterations);
}

TEST_CASE("coarse solver deflates kernel and extra singular directions") {
    // A_c = 1D periodic Laplacian: constant kernel supplied, nothing extra
    std::vector<Triplet> t;
    const std::size_t n = 6;
    for (std::size_t i = 0; i < n; ++i) {
        t.push_back({i, i, 2.0});
        t.push_back({i, (i + 1) % n, -1.0});
        t.push_back({(i + 1) % n, i, -1.0});
    }
    const auto a = SparseMatrix::from_triplets(n, n, t);
    const CoarseSolver with(a, {Vector(n, 1.0)});
    CHECK(with.extra_singular() == 0);
    const CoarseSolver without(a, {});
    CHECK(without.extra_singular() == 1);
    Vector rhs = random_vector(n, 3);
    rhs = project_out(rhs, {Vector(n, 1.0)});
    const Vector x1 = with.solve(rhs), x2 = without.solve(rhs);
    CHECK(testutil::max_abs_diff(spmv(a, x1), rhs) <= 1e-12);
    CHECK(testutil::max_abs_diff(x1, x2) <= 1e-12);
}

TEST_CASE("tail_rate is the geometric mean of the last ratios") {
    CHECK(tail_rate({1.0, 0.5, 0.25, 0.125}) == doctest::Approx(0.5));
    CHECK(tail_rate({1.0}) == 0.0);
}
