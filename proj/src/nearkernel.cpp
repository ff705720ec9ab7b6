#include "nkamg/nearkernel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>

#include "nkamg/dense.hpp"
#include "nkamg/mmio.hpp"

namespace nkamg {

namespace {

constexpr std::size_t unreached = std::numeric_limits<std::size_t>::max();

std::string set_string(const IndexSet& s) {
    std::string out = "{";
    for (std::size_t k = 0; k < s.size(); ++k) out += (k ? "," : "") + std::to_string(s[k]);
    return out + "}";
}

} // namespace

std::vector<std::size_t> bounded_distances(const Graph& g, std::size_t source, std::size_t max_depth) {
    std::vector<std::size_t> d(g.size(), unreached);
    std::deque<std::size_t> q{source};
    d[source] = 0;
    while (!q.empty()) {
        const std::size_t u = q.front();
        q.pop_front();
        if (d[u] == max_depth) continue;
        for (std::size_t v : g[u])
            if (d[v] == unreached) {
                d[v] = d[u] + 1;
                q.push_back(v);
            }
    }
    return d;
}

std::vector<std::pair<std::size_t, IndexSet>> diameter_sets_with_ends(const Graph& g, std::size_t i,
                                                                      std::size_t m) {
    std::vector<std::pair<std::size_t, IndexSet>> out;
    if (m == 0) return out;
    // Only vertices within distance m of i can lie on a geodesic, so work on that ball.
    const auto di = bounded_distances(g, i, m);
    std::vector<std::size_t> ball;
    for (std::size_t v = 0; v < g.size(); ++v)
        if (di[v] != unreached) ball.push_back(v);
    std::set<IndexSet> seen;
    for (std::size_t j : ball) {
        if (di[j] != m) continue;
        const auto dj = bounded_distances(g, j, m);
        IndexSet omega;
        for (std::size_t v : ball)
            if (dj[v] != unreached && di[v] + dj[v] == m) omega.push_back(v);
        if (seen.insert(omega).second) out.emplace_back(j, std::move(omega));
    }
    return out;
}

std::vector<IndexSet> diameter_sets(const SparseMatrix& a, std::size_t i, std::size_t m) {
    NKAMG_CHECK_DIM(i < a.nrows(), "diameter_sets index");
    std::vector<IndexSet> out;
    for (auto& [j, s] : diameter_sets_with_ends(pattern_graph(a), i, m)) out.push_back(std::move(s));
    return out;
}

NearKernelSet find_local_near_kernels(const SparseMatrix& a, std::size_t m, double eps) {
    NKAMG_CHECK_DIM(a.nrows() == a.ncols(), "find_local_near_kernels needs a square matrix");
    if (m < 1) throw Error("find_local_near_kernels: m must be at least 1");
    if (!(eps > 0.0)) throw Error("find_local_near_kernels: eps must be positive");
    const Graph g = pattern_graph(a);
    const std::size_t n = a.nrows();

    struct Candidate {
        std::size_t i, j;
        IndexSet omega;
    };
    std::vector<Candidate> cands;
    std::set<IndexSet> seen;
    for (std::size_t i = 0; i < n; ++i)
        for (auto& [j, omega] : diameter_sets_with_ends(g, i, m))
            if (seen.insert(omega).second) cands.push_back({i, j, std::move(omega)});

    std::vector<EigenPair> pairs(cands.size());
    std::string failure;
    bool failed = false;
    const auto nc = static_cast<std::ptrdiff_t>(cands.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t c = 0; c < nc; ++c) {
        const auto& cd = cands[static_cast<std::size_t>(c)];
        try {
            pairs[static_cast<std::size_t>(c)] = smallest_eigpair(DenseMatrix::principal(a, cd.omega));
        } catch (const std::exception& e) {
#pragma omp critical(nkamg_nk_fail)
            if (!failed) {
                failed = true;
                failure = "local eigensolve failed at i=" + std::to_string(cd.i) + " omega="
                          + set_string(cd.omega) + ": " + e.what();
            }
        }
    }
    if (failed) throw ConvergenceError(failure);

    NearKernelSet nk;
    nk.m = m;
    nk.eps = eps;
    std::vector<Triplet> t;
    for (std::size_t c = 0; c < cands.size(); ++c) {
        if (pairs[c].lambda > eps) continue;
        const std::size_t col = nk.supports.size();
        for (std::size_t k = 0; k < cands[c].omega.size(); ++k)
            t.push_back({cands[c].omega[k], col, pairs[c].vector[k]});
        nk.supports.push_back(cands[c].omega);
        nk.anchor.emplace_back(cands[c].i, cands[c].j);
        nk.lambda.push_back(pairs[c].lambda);
    }
    nk.N = SparseMatrix::from_triplets(n, nk.supports.size(), t);
    return nk;
}

NearKernelSet dedupe_and_orient(const NearKernelSet& nk) {
    NearKernelSet out;
    out.m = nk.m;
    out.eps = nk.eps;
    const SparseMatrix cols = nk.N.transpose();
    std::set<IndexSet> seen;
    std::vector<Triplet> t;
    for (std::size_t c = 0; c < nk.size(); ++c) {
        if (!seen.insert(nk.supports[c]).second) continue;
        auto idx = cols.row_cols(c);
        auto val = cols.row_vals(c);
        double mx = 0.0;
        for (double v : val) mx = std::max(mx, std::abs(v));
        double sign = 1.0;
        for (std::size_t k = 0; k < val.size(); ++k)
            if (std::abs(val[k]) >= mx * (1.0 - 1e-12)) {
                sign = val[k] < 0.0 ? -1.0 : 1.0;
                break;
            }
        const std::size_t col = out.supports.size();
        for (std::size_t k = 0; k < idx.size(); ++k) t.push_back({idx[k], col, sign * val[k]});
        out.supports.push_back(nk.supports[c]);
        out.anchor.push_back(nk.anchor[c]);
        out.lambda.push_back(nk.lambda[c]);
    }
    out.N = SparseMatrix::from_triplets(nk.N.nrows(), out.supports.size(), t);
    return out;
}

double default_eps(const ProblemInstance& p) {
    double rowmax = 0.0;
    for (std::size_t i = 0; i < p.mass.nrows(); ++i) {
        double s = 0.0;
        for (double v : p.mass.row_vals(i)) s += std::abs(v);
        rowmax = std::max(rowmax, s);
    }
    return std::max(p.beta * rowmax, 1e-12);
}

void write_near_kernels(const std::string& prefix, const NearKernelSet& nk) {
    write_matrix_market(prefix + "_N.mtx", nk.N);
    write_index_sets(prefix + "_supports.txt", nk.supports);
}

} // namespace nkamg
