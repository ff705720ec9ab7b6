#include "nkamg/solver.hpp"

#include <cmath>

namespace nkamg {

namespace {

std::vector<Vector> orthonormalize(std::vector<Vector> v) {
    std::vector<Vector> q;
    for (auto& x : v) {
        const double n0 = norm2(x);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& u : q) axpy(-dot(u, x), u, x);
        const double nx = norm2(x);
        if (nx <= 1e-10 * n0 || nx == 0.0) continue;
        for (double& e : x) e /= nx;
        q.push_back(std::move(x));
    }
    return q;
}

Vector residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b) {
    Vector r = spmv(a, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return r;
}

} // namespace

Vector project_out(std::span<const double> b, const std::vector<Vector>& vecs) {
    Vector out(b.begin(), b.end());
    for (const auto& q : orthonormalize(vecs)) axpy(-dot(q, out), q, out);
    return out;
}

namespace {

void project_orthonormal(Vector& x, const std::vector<Vector>& q) {
    for (const auto& u : q) axpy(-dot(u, x), u, x);
}

} // namespace

CoarseSolver::CoarseSolver(const SparseMatrix& a_c, std::vector<Vector> kernel)
    : n_(a_c.nrows()), kernel_(orthonormalize(std::move(kernel))) {
    // Singular directions of A_c outside the supplied kernel are discovered from dropped
    // pivots and added to the border, so the solve acts as a pseudo-inverse.
    for (int round = 0; round < 4; ++round) {
        std::vector<Triplet> t;
        for (std::size_t i = 0; i < n_; ++i) {
            auto c = a_c.row_cols(i);
            auto v = a_c.row_vals(i);
            for (std::size_t k = 0; k < c.size(); ++k) t.push_back({i, c[k], v[k]});
        }
        for (std::size_t q = 0; q < kernel_.size(); ++q)
            for (std::size_t i = 0; i < n_; ++i)
                if (kernel_[q][i] != 0.0) {
                    t.push_back({i, n_ + q, kernel_[q][i]});
                    t.push_back({n_ + q, i, kernel_[q][i]});
                }
        const std::size_t m = n_ + kernel_.size();
        factor_ = SparseFactor(SparseMatrix::from_triplets(m, m, t), true);
        if (factor_.dropped_pivots() == 0) return;
        std::vector<Vector> grown = kernel_;
        for (auto v : factor_.null_vectors()) {
            v.resize(n_);
            grown.push_back(std::move(v));
        }
        const std::size_t before = kernel_.size();
        kernel_ = orthonormalize(std::move(grown));
        extra_ += kernel_.size() - before;
        if (kernel_.size() == before) return;
    }
}

Vector CoarseSolver::solve(std::span<const double> rhs) const {
    NKAMG_CHECK_DIM(rhs.size() == n_, "coarse solve length");
    Vector r(rhs.begin(), rhs.end());
    project_orthonormal(r, kernel_);
    r.resize(n_ + kernel_.size(), 0.0);
    factor_.solve_in_place(r);
    r.resize(n_);
    return r;
}

TwoGridHierarchy build_hierarchy(const SparseMatrix& a, const SparseMatrix& p, SmootherPtr pre, SmootherPtr post,
                                 const std::vector<Vector>& fine_kernel) {
    NKAMG_CHECK_DIM(a.nrows() == a.ncols() && p.nrows() == a.nrows(), "build_hierarchy sizes");
    TwoGridHierarchy h;
    h.A = a;
    h.P = p;
    h.Pt = p.transpose();
    h.A_c = sptriple(h.Pt, a, p);
    h.pre = std::move(pre);
    h.post = std::move(post);
    std::vector<Vector> coarse_kernel;
    if (!fine_kernel.empty()) {
        const SparseMatrix ptp = multiply(h.Pt, p);
        const SparseFactor f(ptp, true);
        const double scale = frobenius_norm(h.A_c);
        for (const auto& z : fine_kernel) {
            NKAMG_CHECK_DIM(z.size() == a.nrows(), "fine kernel vector length");
            const Vector y = refined_solve(ptp, f, spmv(h.Pt, z), 1e-10);
            const double ny = norm2(y);
            if (ny == 0.0) continue;
            if (norm2(spmv(h.A_c, y)) <= 1e-9 * scale * ny) coarse_kernel.push_back(y);
        }
    }
    h.coarse = CoarseSolver(h.A_c, std::move(coarse_kernel));
    return h;
}

void twogrid_cycle(const TwoGridHierarchy& h, std::span<double> x, std::span<const double> b) {
    NKAMG_CHECK_DIM(x.size() == h.A.nrows() && b.size() == h.A.nrows(), "twogrid_cycle vector length");
    if (h.pre) h.pre->smooth(h.A, x, b);
    const Vector r = residual(h.A, x, b);
    const Vector ec = h.coarse.solve(spmv(h.Pt, r));
    const Vector e = spmv(h.P, ec);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += e[i];
    if (h.post) h.post->smooth(h.A, x, b);
}

double tail_rate(const std::vector<double>& history) {
    if (history.size() < 2) return 0.0;
    const std::size_t last = history.size() - 1;
    const std::size_t count = std::min<std::size_t>(5, last);
    const double num = history[last];
    const double den = history[last - count];
    if (den == 0.0) return 0.0;
    return std::pow(num / den, 1.0 / static_cast<double>(count));
}

SolveReport measure_rate(const TwoGridHierarchy& h, std::span<const double> b, double tol, std::size_t max_iter) {
    const std::size_t n = h.A.nrows();
    NKAMG_CHECK_DIM(b.size() == n, "measure_rate rhs length");
    SolveReport rep;
    Vector x(n, 0.0);
    const double r0 = norm2(b);
    if (r0 == 0.0) throw Error("measure_rate: zero right-hand side");
    rep.residual_history.push_back(r0);
    std::size_t growth = 0;
    for (std::size_t k = 0; k < max_iter; ++k) {
        twogrid_cycle(h, x, b);
        const double r = norm2(residual(h.A, x, b));
        const double prev = rep.residual_history.back();
        rep.residual_history.push_back(r);
        rep.iterations = k + 1;
        growth = (prev > 0.0 && r / prev > 1.5) ? growth + 1 : 0;
        if (r <= tol * r0) {
            rep.converged = true;
            break;
        }
        if (growth >= 5 || !std::isfinite(r)) {
            rep.diverged = true;
            break;
        }
    }
    rep.asymptotic_rate = tail_rate(rep.residual_history);
    return rep;
}

namespace {

SolveReport run_cg(const SparseMatrix& a, std::span<const double> b, double tol, std::size_t max_iter,
                   const std::function<Vector(const Vector&)>& precond) {
    const std::size_t n = a.nrows();
    NKAMG_CHECK_DIM(b.size() == n, "cg rhs length");
    SolveReport rep;
    Vector x(n, 0.0), r(b.begin(), b.end());
    const double r0 = norm2(r);
    rep.residual_history.push_back(r0);
    if (r0 == 0.0) {
        rep.converged = true;
        return rep;
    }
    Vector z = precond(r);
    Vector p = z;
    double rz = dot(r, z);
    for (std::size_t k = 1; k <= max_iter; ++k) {
        const Vector ap = spmv(a, p);
        const double curv = dot(p, ap);
        if (!(curv > 0.0)) throw Error("cg: nonpositive curvature p^T A p = " + std::to_string(curv));
        const double alpha = rz / curv;
        axpy(alpha, p, x);
        axpy(-alpha, ap, r);
        const double rn = norm2(r);
        rep.residual_history.push_back(rn);
        rep.iterations = k;
        if (rn <= tol * r0) {
            rep.converged = true;
            break;
        }
        z = precond(r);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    rep.asymptotic_rate = tail_rate(rep.residual_history);
    return rep;
}

} // namespace

SolveReport cg(const SparseMatrix& a, std::span<const double> b, double tol, std::size_t max_iter) {
    return run_cg(a, b, tol, max_iter, [](const Vector& r) { return r; });
}

SolveReport pcg(const TwoGridHierarchy& h, std::span<const double> b, double tol, std::size_t max_iter) {
    return run_cg(h.A, b, tol, max_iter, [&](const Vector& r) {
        Vector z(r.size(), 0.0);
        twogrid_cycle(h, z, r);
        return z;
    });
}

DenseMatrix twogrid_propagator(const TwoGridHierarchy& h) {
    const std::size_t n = h.A.nrows();
    DenseMatrix e(n, n);
    const Vector zero(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        Vector x(n, 0.0);
        x[j] = 1.0;
        twogrid_cycle(h, x, zero);
        e.set_column(j, x);
    }
    return e;
}

} // namespace nkamg
