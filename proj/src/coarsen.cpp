#include "nkamg/coarsen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>

#include "nkamg/factor.hpp"
#include "nkamg/mmio.hpp"
#include "nkamg/solver.hpp"

namespace nkamg {

namespace {

int sign_of(double v) { return v < 0.0 ? -1 : 1; }

bool contains_sorted(const IndexSet& s, std::size_t v) { return std::binary_search(s.begin(), s.end(), v); }

IndexSet intersect(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

Graph drop_graph(const SparseMatrix& a, double rel) {
    const double cut = rel * max_abs(a);
    Graph g(a.nrows());
    for (std::size_t i = 0; i < a.nrows(); ++i) {
        auto c = a.row_cols(i);
        auto v = a.row_vals(i);
        for (std::size_t k = 0; k < c.size(); ++k)
            if (c[k] != i && std::abs(v[k]) > cut) {
                g[i].push_back(c[k]);
                g[c[k]].push_back(i);
            }
    }
    for (auto& l : g) {
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
    }
    return g;
}

SparseMatrix euclidean_columns(std::size_t n, const IndexSet& idx) {
    std::vector<Triplet> t;
    for (std::size_t k = 0; k < idx.size(); ++k) t.push_back({idx[k], k, 1.0});
    return SparseMatrix::from_triplets(n, idx.size(), t);
}

} // namespace

Graph strength_graph(const SparseMatrix& a, double theta, StrengthMode mode) {
    NKAMG_CHECK_DIM(a.nrows() == a.ncols(), "strength_graph needs a square matrix");
    const std::size_t n = a.nrows();
    Graph g(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto c = a.row_cols(i);
        auto v = a.row_vals(i);
        auto measure = [&](double x) { return mode == StrengthMode::negative ? -x : std::abs(x); };
        double mx = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k)
            if (c[k] != i) mx = std::max(mx, measure(v[k]));
        if (mx <= 0.0) continue;
        for (std::size_t k = 0; k < c.size(); ++k)
            if (c[k] != i && measure(v[k]) > 0.0 && measure(v[k]) >= theta * mx) {
                g[i].push_back(c[k]);
                g[c[k]].push_back(i);
            }
    }
    for (auto& l : g) {
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
    }
    return g;
}

CFSplit cf_split(const SparseMatrix& a_n, double theta, StrengthMode mode) {
    const Graph s = strength_graph(a_n, theta, mode);
    const std::size_t n = s.size();
    enum : char { U, C, F };
    std::vector<char> state(n, U);
    std::vector<std::size_t> lambda(n);
    // Ordered by (measure descending, index ascending).
    auto cmp = [](const std::pair<std::size_t, std::size_t>& x, const std::pair<std::size_t, std::size_t>& y) {
        return x.first != y.first ? x.first > y.first : x.second < y.second;
    };
    std::set<std::pair<std::size_t, std::size_t>, decltype(cmp)> queue(cmp);
    for (std::size_t i = 0; i < n; ++i) {
        lambda[i] = s[i].size();
        if (s[i].empty())
            state[i] = C;
        else
            queue.insert({lambda[i], i});
    }
    while (!queue.empty()) {
        const std::size_t i = queue.begin()->second;
        queue.erase(queue.begin());
        state[i] = C;
        for (std::size_t j : s[i]) {
            if (state[j] != U) continue;
            state[j] = F;
            queue.erase({lambda[j], j});
            for (std::size_t k : s[j])
                if (state[k] == U) {
                    queue.erase({lambda[k], k});
                    ++lambda[k];
                    queue.insert({lambda[k], k});
                }
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (state[i] == F && std::none_of(s[i].begin(), s[i].end(), [&](std::size_t j) { return state[j] == C; }))
            state[i] = C;
    CFSplit out;
    out.strength_threshold = theta;
    for (std::size_t i = 0; i < n; ++i) (state[i] == C ? out.coarse : out.fine).push_back(i);
    return out;
}

SplitBasis form_split_basis(const SparseMatrix& a, const SparseMatrix& n, const SparseMatrix& a_n,
                            const CFSplit& split, const BasisOptions& opts) {
    NKAMG_CHECK_DIM(n.nrows() == a.nrows(), "form_split_basis: N rows");
    NKAMG_CHECK_DIM(a_n.nrows() == n.ncols() && a_n.ncols() == n.ncols(), "form_split_basis: A_N size");
    if (split.coarse.empty()) throw Error("form_split_basis: empty coarse set");
    const std::size_t nn = n.ncols();
    const std::size_t ndof = a.nrows();
    const Graph nb = opts.path_theta > 0.0 ? strength_graph(a_n, opts.path_theta, StrengthMode::absolute)
                                           : drop_graph(a_n, 1e-10);
    const SparseMatrix nt = n.transpose();
    std::vector<IndexSet> supp(nn);
    for (std::size_t c = 0; c < nn; ++c) supp[c].assign(nt.row_cols(c).begin(), nt.row_cols(c).end());

    std::vector<char> is_coarse(nn, 0);
    for (std::size_t c : split.coarse) is_coarse[c] = 1;
    std::vector<char> claimed(ndof, 0);

    SplitBasis out;
    std::vector<Triplet> rt;
    const double r2 = 1.0 / std::sqrt(2.0);
    auto add_row = [&](std::size_t i, std::size_t k, std::size_t j, std::size_t x, std::size_t y, bool diag) {
        // Orient i -> k -> j: the entry at x undoes column i, the entry at y continues
        // through column k so that the signed pair cancels against N[:, k].
        const int s1 = -sign_of(n.at(x, i));
        const int s2 = -s1 * sign_of(n.at(x, k)) * sign_of(n.at(y, k));
        const std::size_t row = out.paths.size();
        rt.push_back({row, x, s1 * r2});
        rt.push_back({row, y, s2 * r2});
        out.paths.push_back({i, k, j, x, y, s1, s2, diag});
        claimed[x] = claimed[y] = 1;
    };
    auto unclaimed = [&](const IndexSet& s) {
        IndexSet o;
        for (std::size_t v : s)
            if (!claimed[v]) o.push_back(v);
        return o;
    };

    std::vector<std::size_t> mark(nn, nn);
    for (std::size_t a_node : split.coarse) {
        // Coarse partners at distance two.
        IndexSet partners;
        for (std::size_t k : nb[a_node])
            for (std::size_t b : nb[k])
                if (b > a_node && is_coarse[b] && mark[b] != a_node && !contains_sorted(nb[a_node], b)) {
                    mark[b] = a_node;
                    partners.push_back(b);
                }
        std::sort(partners.begin(), partners.end());
        for (std::size_t b : partners) {
            const IndexSet ks = intersect(nb[a_node], nb[b]);
            IndexSet used;
            for (std::size_t k : ks) {
                if (std::any_of(used.begin(), used.end(), [&](std::size_t u) { return contains_sorted(nb[k], u); }))
                    continue;
                const IndexSet d1 = unclaimed(intersect(supp[a_node], supp[k]));
                const IndexSet d2 = unclaimed(intersect(supp[k], supp[b]));
                bool found = false;
                for (std::size_t x : d1) {
                    for (std::size_t y : d2)
                        if (x != y) {
                            add_row(a_node, k, b, x, y, false);
                            found = true;
                            break;
                        }
                    if (found) break;
                }
                if (found) used.push_back(k);
            }
            if (used.empty()) out.skipped_pairs.emplace_back(a_node, b);
        }
    }

    if (opts.diagonal_paths) {
        // Support-sharing graph between nodes.
        std::vector<IndexSet> dof_nodes(ndof);
        for (std::size_t c = 0; c < nn; ++c)
            for (std::size_t d : supp[c]) dof_nodes[d].push_back(c);
        Graph ov(nn);
        for (std::size_t c = 0; c < nn; ++c) {
            for (std::size_t d : supp[c])
                for (std::size_t o : dof_nodes[d])
                    if (o != c) ov[c].push_back(o);
            std::sort(ov[c].begin(), ov[c].end());
            ov[c].erase(std::unique(ov[c].begin(), ov[c].end()), ov[c].end());
        }
        for (std::size_t a_node : split.coarse)
            for (std::size_t b : nb[a_node]) {
                if (b <= a_node || !is_coarse[b] || contains_sorted(ov[a_node], b)) continue;
                const IndexSet ks = intersect(ov[a_node], ov[b]);
                if (ks.empty()) continue;
                const std::size_t k = ks.front();
                const std::size_t x = intersect(supp[a_node], supp[k]).front();
                const std::size_t y = intersect(supp[k], supp[b]).front();
                add_row(a_node, k, b, x, y, true);
            }
    }

    out.R = SparseMatrix::from_triplets(out.paths.size(), ndof, rt);
    for (std::size_t d = 0; d < ndof; ++d)
        if (!claimed[d]) out.fine_dofs.push_back(d);
    out.S = euclidean_columns(ndof, out.fine_dofs);
    return out;
}

SplitBasis form_split_basis(const SparseMatrix& a, const NearKernelSet& nk, const CFSplit& split,
                            const BasisOptions& opts) {
    const SparseMatrix a_n = sptriple(nk.N.transpose(), a, nk.N);
    return form_split_basis(a, nk.N, a_n, split, opts);
}

SplitBasis classical_split(std::size_t n, const CFSplit& split) {
    SplitBasis b;
    b.R = euclidean_columns(n, split.coarse).transpose();
    b.fine_dofs = split.fine;
    b.S = euclidean_columns(n, split.fine);
    return b;
}

SplitBasis geometric_split(const MeshInfo& mesh) {
    if (mesh.topology != Topology::quad_periodic) throw Error("geometric_split needs a periodic quad mesh");
    const std::size_t nx = mesh.nx, ny = mesh.ny;
    if (nx % 2 || ny % 2) throw Error("geometric_split needs even nx and ny");
    const std::size_t nn = nx * ny;
    auto hedge = [&](std::size_t x, std::size_t y) { return (x % nx) + nx * (y % ny); };
    auto vedge = [&](std::size_t x, std::size_t y) { return nn + (x % nx) + nx * (y % ny); };
    SplitBasis b;
    std::vector<Triplet> t;
    std::vector<char> used(2 * nn, 0);
    const double r2 = 1.0 / std::sqrt(2.0);
    std::size_t row = 0;
    auto pair = [&](std::size_t e1, std::size_t e2) {
        t.push_back({row, e1, r2});
        t.push_back({row, e2, r2});
        used[e1] = used[e2] = 1;
        ++row;
    };
    for (std::size_t y = 0; y < ny; y += 2)
        for (std::size_t x = 0; x < nx; x += 2) pair(hedge(x, y), hedge(x + 1, y));
    for (std::size_t y = 0; y < ny; y += 2)
        for (std::size_t x = 0; x < nx; x += 2) pair(vedge(x, y), vedge(x, y + 1));
    b.R = SparseMatrix::from_triplets(row, 2 * nn, t);
    for (std::size_t e = 0; e < 2 * nn; ++e)
        if (!used[e]) b.fine_dofs.push_back(e);
    b.S = euclidean_columns(2 * nn, b.fine_dofs);
    return b;
}

Interpolation ideal_interpolation(const SparseMatrix& a, const SplitBasis& basis, double tol,
                                  bool allow_singular) {
    NKAMG_CHECK_DIM(basis.R.ncols() == a.nrows() && basis.S.nrows() == a.nrows(),
                    "ideal_interpolation: basis size");
    Interpolation out;
    out.basis = basis;
    out.kind = InterpolationKind::ideal;
    const SparseMatrix rt = basis.R.transpose();
    if (basis.S.ncols() == 0) {
        out.P = rt;
        return out;
    }
    const SparseMatrix st = basis.S.transpose();
    const SparseMatrix k = sptriple(st, a, basis.S);
    SparseFactor factor;
    try {
        factor = SparseFactor(k, allow_singular);
    } catch (const SingularError& e) {
        throw SingularError(std::string("ideal_interpolation: S^T A S is singular (") + e.what() + ")",
                            e.pivot_index);
    }
    // A singular S^T A S is solved through a kernel-bordered system instead.
    std::optional<CoarseSolver> bordered;
    if (factor.dropped_pivots() > 0) bordered.emplace(k, factor.null_vectors());
    // Row c of rhs_t is S^T A R^T e_c.
    const SparseMatrix rhs_t = sptriple(st, a, rt).transpose();
    const std::size_t nc = basis.R.nrows();
    std::vector<Vector> ys(nc);
    std::string failure;
    const auto snc = static_cast<std::ptrdiff_t>(nc);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t sc = 0; sc < snc; ++sc) {
        const auto c = static_cast<std::size_t>(sc);
        Vector rhs(k.nrows(), 0.0);
        auto cc = rhs_t.row_cols(c);
        auto vv = rhs_t.row_vals(c);
        for (std::size_t q = 0; q < cc.size(); ++q) rhs[cc[q]] = vv[q];
        try {
            ys[c] = bordered ? bordered->solve(rhs) : refined_solve(k, factor, rhs, tol);
        } catch (const std::exception& e) {
#pragma omp critical(nkamg_ideal_fail)
            if (failure.empty()) failure = e.what();
        }
    }
    if (!failure.empty()) throw ConvergenceError("ideal_interpolation: " + failure);
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < rt.nrows(); ++i) {
        auto c = rt.row_cols(i);
        auto v = rt.row_vals(i);
        for (std::size_t q = 0; q < c.size(); ++q) t.push_back({i, c[q], v[q]});
    }
    // Expand -S y through the rows of S^T.
    for (std::size_t f = 0; f < st.nrows(); ++f) {
        auto c = st.row_cols(f);
        auto v = st.row_vals(f);
        for (std::size_t cc = 0; cc < nc; ++cc) {
            const double y = ys[cc][f];
            if (y == 0.0) continue;
            for (std::size_t q = 0; q < c.size(); ++q) t.push_back({c[q], cc, -v[q] * y});
        }
    }
    out.P = SparseMatrix::from_triplets(a.nrows(), nc, t);
    return out;
}

Interpolation classical_ideal(const SparseMatrix& a, double theta, StrengthMode mode) {
    const CFSplit split = cf_split(a, theta, mode);
    Interpolation p = ideal_interpolation(a, classical_split(a.nrows(), split));
    p.kind = InterpolationKind::classical_ideal;
    return p;
}

SparseMatrix nedelec_prolongation(const MeshInfo& fine) {
    if (fine.topology != Topology::quad_periodic) throw Error("nedelec_prolongation needs a periodic quad mesh");
    const std::size_t nx = fine.nx, ny = fine.ny;
    if (nx % 2 || ny % 2 || nx < 4 || ny < 4)
        throw Error("nedelec_prolongation needs even nx, ny >= 4");
    const std::size_t nn = nx * ny, cx = nx / 2, cy = ny / 2, cn = cx * cy;
    auto hedge = [&](std::size_t x, std::size_t y) { return (x % nx) + nx * (y % ny); };
    auto vedge = [&](std::size_t x, std::size_t y) { return nn + (x % nx) + nx * (y % ny); };
    std::vector<Triplet> t;
    for (std::size_t y = 0; y < cy; ++y)
        for (std::size_t x = 0; x < cx; ++x) {
            const std::size_t ch = x + cx * y, cv = cn + x + cx * y;
            const std::size_t fx = 2 * x, fy = 2 * y;
            for (std::size_t d = 0; d < 2; ++d) {
                t.push_back({hedge(fx + d, fy), ch, 0.5});
                t.push_back({hedge(fx + d, fy + 1), ch, 0.25});
                t.push_back({hedge(fx + d, fy + ny - 1), ch, 0.25});
                t.push_back({vedge(fx, fy + d), cv, 0.5});
                t.push_back({vedge(fx + 1, fy + d), cv, 0.25});
                t.push_back({vedge(fx + nx - 1, fy + d), cv, 0.25});
            }
        }
    return SparseMatrix::from_triplets(2 * nn, 2 * cn, t);
}

double operator_complexity(const SparseMatrix& a, const SparseMatrix& a_c) {
    const double fine = static_cast<double>(count_significant(a, 1e-13));
    const double coarse = a_c.nnz() == 0 ? 0.0 : static_cast<double>(count_significant(a_c, 1e-13));
    return (fine + coarse) / fine;
}

namespace {

// Orthonormal basis of the column space by twice-applied modified Gram-Schmidt.
std::vector<Vector> orthonormal_basis(const SparseMatrix& p) {
    const DenseMatrix d = DenseMatrix::from_sparse(p);
    double scale = 0.0;
    for (std::size_t j = 0; j < d.ncols(); ++j) scale = std::max(scale, norm2(d.column(j)));
    std::vector<Vector> q;
    for (std::size_t j = 0; j < d.ncols(); ++j) {
        Vector v = d.column(j);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& u : q) axpy(-dot(u, v), u, v);
        const double nv = norm2(v);
        if (nv <= 1e-10 * scale) continue;
        for (double& x : v) x /= nv;
        q.push_back(std::move(v));
    }
    return q;
}

double one_sided(const std::vector<Vector>& q1, const std::vector<Vector>& q2) {
    if (q1.empty()) return 0.0;
    const std::size_t k = q1.size();
    std::vector<Vector> m;
    for (const auto& v : q1) {
        Vector w = v;
        for (const auto& u : q2) axpy(-dot(u, w), u, w);
        m.push_back(std::move(w));
    }
    DenseMatrix g(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j <= i; ++j) g(i, j) = g(j, i) = dot(m[i], m[j]);
    const auto eig = symmetric_eigen(g);
    return std::sqrt(std::max(0.0, eig.values.back()));
}

} // namespace

double subspace_distance(const SparseMatrix& p1, const SparseMatrix& p2) {
    NKAMG_CHECK_DIM(p1.nrows() == p2.nrows(), "subspace_distance row counts");
    const auto q1 = orthonormal_basis(p1);
    const auto q2 = orthonormal_basis(p2);
    if (q1.size() != q2.size()) return 1.0;
    return std::max(one_sided(q1, q2), one_sided(q2, q1));
}

void write_split_basis(const std::string& prefix, const SplitBasis& basis) {
    write_matrix_market(prefix + "_R.mtx", basis.R);
    write_matrix_market(prefix + "_S.mtx", basis.S);
    std::ofstream out(prefix + "_paths.txt");
    if (!out) throw Error("cannot write " + prefix + "_paths.txt");
    for (const auto& p : basis.paths)
        out << p.i << " " << p.k << " " << p.j << " " << p.dof1 << " " << p.s1 << " " << p.dof2 << " "
            << p.s2 << "\n";
}

} // namespace nkamg
