#include "nkamg/factor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace nkamg {

std::vector<std::vector<std::size_t>> connected_components(const SparseMatrix& a) {
    const auto adj = pattern_graph(a);
    const std::size_t n = a.nrows();
    std::vector<std::size_t> label(n, n);
    std::vector<std::vector<std::size_t>> comps;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n; ++s) {
        if (label[s] != n) continue;
        const std::size_t id = comps.size();
        comps.emplace_back();
        label[s] = id;
        stack.push_back(s);
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            comps[id].push_back(u);
            for (std::size_t v : adj[u])
                if (label[v] == n) {
                    label[v] = id;
                    stack.push_back(v);
                }
        }
        std::sort(comps[id].begin(), comps[id].end());
    }
    return comps;
}

SparseFactor::SparseFactor(const SparseMatrix& a, bool allow_singular) : n_(a.nrows()) {
    NKAMG_CHECK_DIM(a.nrows() == a.ncols(), "SparseFactor needs a square matrix");
    components_ = connected_components(a);
    factors_.resize(components_.size());
    std::string failure;
    std::size_t failed_index = 0;
    bool failed = false;
    const auto nc = static_cast<std::ptrdiff_t>(components_.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < nc; ++c) {
        const auto& idx = components_[static_cast<std::size_t>(c)];
        try {
            factors_[static_cast<std::size_t>(c)] = LdltFactor(DenseMatrix::principal(a, idx), allow_singular);
        } catch (const SingularError& e) {
#pragma omp critical(nkamg_factor_fail)
            if (!failed || idx[e.pivot_index] < failed_index) {
                failed = true;
                failed_index = idx[e.pivot_index];
                failure = e.what();
            }
        }
    }
    if (failed)
        throw SingularError("SparseFactor: singular block at row " + std::to_string(failed_index)
                                + " (" + failure + ")",
                            failed_index);
}

std::size_t SparseFactor::dropped_pivots() const {
    std::size_t d = 0;
    for (const auto& f : factors_) d += f.dropped_pivots();
    return d;
}

std::vector<Vector> SparseFactor::null_vectors() const {
    std::vector<Vector> out;
    for (std::size_t c = 0; c < components_.size(); ++c)
        for (const auto& local : factors_[c].null_vectors()) {
            Vector v(n_, 0.0);
            for (std::size_t k = 0; k < local.size(); ++k) v[components_[c][k]] = local[k];
            out.push_back(std::move(v));
        }
    return out;
}

std::size_t SparseFactor::largest_component() const {
    std::size_t m = 0;
    for (const auto& c : components_) m = std::max(m, c.size());
    return m;
}

void SparseFactor::solve_in_place(std::span<double> x) const {
    NKAMG_CHECK_DIM(x.size() == n_, "SparseFactor::solve length");
    Vector local;
    for (std::size_t c = 0; c < components_.size(); ++c) {
        const auto& idx = components_[c];
        local.resize(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) local[k] = x[idx[k]];
        factors_[c].solve_in_place(local);
        for (std::size_t k = 0; k < idx.size(); ++k) x[idx[k]] = local[k];
    }
}

Vector SparseFactor::solve(std::span<const double> rhs) const {
    Vector x(rhs.begin(), rhs.end());
    solve_in_place(x);
    return x;
}

Vector refined_solve(const SparseMatrix& a, const SparseFactor& f, std::span<const double> rhs,
                     double tol) {
    NKAMG_CHECK_DIM(rhs.size() == a.nrows(), "sparse_solve rhs length");
    const double bnorm = norm2(rhs);
    Vector x = f.solve(rhs);
    if (bnorm == 0.0) return x;
    double rel = 0.0;
    for (int step = 0; step < 3; ++step) {
        Vector r = spmv(a, x);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
        rel = norm2(r) / bnorm;
        if (rel <= tol) return x;
        f.solve_in_place(r);
        axpy(1.0, r, x);
    }
    Vector r = spmv(a, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
    rel = norm2(r) / bnorm;
    if (rel > tol) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "sparse_solve: relative residual %.3e above tolerance %.1e", rel, tol);
        throw ConvergenceError(buf);
    }
    return x;
}

Vector sparse_solve(const SparseMatrix& a, std::span<const double> rhs, double tol) {
    SparseFactor f(a);
    return refined_solve(a, f, rhs, tol);
}

} // namespace nkamg
