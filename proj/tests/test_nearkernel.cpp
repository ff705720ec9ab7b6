#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "nkamg/discretize.hpp"
#include "nkamg/nearkernel.hpp"

using namespace nkamg;

TEST_CASE("diameter_sets on a path graph") {
    const auto a = testutil::path_graph(3);
    auto s = diameter_sets(a, 0, 2);
    REQUIRE(s.size() == 1);
    CHECK(s[0] == IndexSet{0, 1, 2});
    s = diameter_sets(a, 0, 1);
    REQUIRE(s.size() == 1);
    CHECK(s[0] == IndexSet{0, 1});
    CHECK(diameter_sets(SparseMatrix::identity(3), 1, 2).empty());
}

TEST_CASE("diameter sets are geodesic corridors") {
    // 4-cycle 0-1-2-3-0: both geodesics from 0 to 2 are in the corridor
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < 4; ++i) {
        t.push_back({i, i, 2.0});
        t.push_back({i, (i + 1) % 4, -1.0});
        t.push_back({(i + 1) % 4, i, -1.0});
    }
    const auto s = diameter_sets(SparseMatrix::from_triplets(4, 4, t), 0, 2);
    REQUIRE(s.size() == 1);
    CHECK(s[0] == IndexSet{0, 1, 2, 3});
}

TEST_CASE("bounded_distances truncates at the depth") {
    Graph g = {{1}, {0, 2}, {1, 3}, {2}};
    const auto d = bounded_distances(g, 0, 2);
    CHECK(d[2] == 2);
    CHECK(d[3] == SIZE_MAX);
}

TEST_CASE("find_local_near_kernels returns nothing without local kernels") {
    const auto d = SparseMatrix::diagonal(Vector{5, 5, 5});
    CHECK(find_local_near_kernels(d, 1, 1.0).size() == 0);
    CHECK(find_local_near_kernels(testutil::laplacian1d(5), 2, 1e-8).size() == 0);
}

TEST_CASE("near-kernels on the periodic quad mesh are the node gradients") {
    const auto p = curlcurl_quad_periodic(4, 4, 0.01);
    const auto nk = dedupe_and_orient(find_local_near_kernels(p.A, 2, default_eps(p)));
    REQUIRE(nk.size() >= p.G.ncols());
    const auto gt = p.G.transpose();
    const auto ndense = DenseMatrix::from_sparse(nk.N);
    for (std::size_t node = 0; node < gt.nrows(); ++node) {
        Vector g(p.size(), 0.0);
        auto c = gt.row_cols(node);
        auto v = gt.row_vals(node);
        for (std::size_t k = 0; k < c.size(); ++k) g[c[k]] = v[k] / 2.0; // unit norm
        double best = 1.0;
        for (std::size_t l = 0; l < nk.size(); ++l) {
            const Vector col = ndense.column(l);
            double dp = 0.0, dm = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                dp = std::max(dp, std::abs(col[i] - g[i]));
                dm = std::max(dm, std::abs(col[i] + g[i]));
            }
            best = std::min({best, dp, dm});
        }
        CHECK(best <= 1e-9);
    }
}

TEST_CASE("near-kernel columns are unit vectors supported on their patch") {
    const auto p = curlcurl_quad_periodic(4, 4, 0.01);
    const auto nk = find_local_near_kernels(p.A, 2, default_eps(p));
    const auto nt = nk.N.transpose();
    for (std::size_t l = 0; l < nk.size(); ++l) {
        CHECK(norm2(nt.row_vals(l)) == doctest::Approx(1.0));
        for (std::size_t c : nt.row_cols(l))
            CHECK(std::binary_search(nk.supports[l].begin(), nk.supports[l].end(), c));
        CHECK(nk.lambda[l] <= nk.eps);
    }
    // gradient stars have local eigenvalue 2/3 beta
    CHECK(*std::min_element(nk.lambda.begin(), nk.lambda.end()) == doctest::Approx(2.0 / 3.0 * 0.01));
}

TEST_CASE("dedupe_and_orient examples") {
    NearKernelSet nk;
    const double s = 1.0 / std::sqrt(2.0);
    nk.N = SparseMatrix::from_triplets(2, 2, std::vector<Triplet>{{0, 0, -s}, {1, 0, s}, {0, 1, -s}, {1, 1, s}});
    nk.supports = {{0, 1}, {0, 1}};
    nk.anchor = {{0, 1}, {1, 0}};
    nk.lambda = {0.0, 0.0};
    const auto d = dedupe_and_orient(nk);
    REQUIRE(d.size() == 1);
    CHECK(d.N.at(0, 0) == doctest::Approx(s));
    CHECK(d.N.at(1, 0) == doctest::Approx(-s));
    CHECK(dedupe_and_orient(NearKernelSet{}).size() == 0);
}

TEST_CASE("triangle mesh needs diameter three for the gradient stars") {
    const auto p = curlcurl_tri_dirichlet(4, 4, 0.01);
    const auto n3 = dedupe_and_orient(find_local_near_kernels(p.A, 3, default_eps(p)));
    CHECK(n3.size() >= p.G.ncols());
}
