#include "nkamg/smoothers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nkamg {

namespace {

void check(const SparseMatrix& a, std::size_t n, std::span<double> x, std::span<const double> b) {
    NKAMG_CHECK_DIM(a.nrows() == n && a.ncols() == n, "smoother built for a different size");
    NKAMG_CHECK_DIM(x.size() == n && b.size() == n, "smoother vector length");
}

Vector residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b) {
    Vector r = spmv(a, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return r;
}

// Gauss-Seidel on m for m g = rhs, updating g in place.
void gs_sweep(const SparseMatrix& m, std::span<double> g, std::span<const double> rhs,
              const Vector& diag, Sweep dir) {
    const std::size_t n = m.nrows();
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t i = dir == Sweep::forward ? s : n - 1 - s;
        double acc = rhs[i];
        auto c = m.row_cols(i);
        auto v = m.row_vals(i);
        for (std::size_t k = 0; k < c.size(); ++k)
            if (c[k] != i) acc -= v[k] * g[c[k]];
        g[i] = acc / diag[i];
    }
}

Vector checked_diagonal(const SparseMatrix& m, const char* what) {
    Vector d = m.diagonal_values();
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i] == 0.0)
            throw Error(std::string(what) + ": zero diagonal entry at row " + std::to_string(i));
    return d;
}

class L1Jacobi final : public Smoother {
public:
    L1Jacobi(const SparseMatrix& a, double omega) : n_(a.nrows()), omega_(omega), inv_(a.nrows()) {
        for (std::size_t i = 0; i < n_; ++i) {
            double s = 0.0;
            for (double v : a.row_vals(i)) s += std::abs(v);
            if (s == 0.0) throw Error("l1jacobi: zero row " + std::to_string(i));
            inv_[i] = omega / s;
        }
    }
    void smooth(const SparseMatrix& a, std::span<double> x, std::span<const double> b) const override {
        check(a, n_, x, b);
        const Vector r = residual(a, x, b);
        for (std::size_t i = 0; i < n_; ++i) x[i] += inv_[i] * r[i];
    }
    void smooth_adjoint(const SparseMatrix& a, std::span<double> x,
                        std::span<const double> b) const override {
        smooth(a, x, b);
    }
    std::string name() const override { return "l1jacobi(" + std::to_string(omega_) + ")"; }
    std::size_t size() const override { return n_; }

private:
    std::size_t n_;
    double omega_;
    Vector inv_;
};

class GaussSeidel final : public Smoother {
public:
    GaussSeidel(const SparseMatrix& a, Sweep dir)
        : n_(a.nrows()), dir_(dir), diag_(checked_diagonal(a, "gauss_seidel")) {}
    void smooth(const SparseMatrix& a, std::span<double> x, std::span<const double> b) const override {
        check(a, n_, x, b);
        gs_sweep(a, x, b, diag_, dir_);
    }
    void smooth_adjoint(const SparseMatrix& a, std::span<double> x,
                        std::span<const double> b) const override {
        check(a, n_, x, b);
        gs_sweep(a, x, b, diag_, dir_ == Sweep::forward ? Sweep::backward : Sweep::forward);
    }
    std::string name() const override {
        return dir_ == Sweep::forward ? "gauss_seidel(forward)" : "gauss_seidel(backward)";
    }
    std::size_t size() const override { return n_; }

private:
    std::size_t n_;
    Sweep dir_;
    Vector diag_;
};

class Distributive final : public Smoother {
public:
    Distributive(const SparseMatrix& a, const SparseMatrix& n, Sweep dir)
        : n_(a.nrows()), dir_(dir), N_(n), Nt_(n.transpose()), AN_(sptriple(Nt_, a, N_)),
          diag_(checked_diagonal(AN_, "distributive: N^T A N")) {
        NKAMG_CHECK_DIM(n.nrows() == a.nrows(), "distributive: N rows");
        if (n.ncols() == 0) throw Error("distributive: empty near-kernel set");
    }
    void smooth(const SparseMatrix& a, std::span<double> x, std::span<const double> b) const override {
        run(a, x, b, dir_);
    }
    void smooth_adjoint(const SparseMatrix& a, std::span<double> x,
                        std::span<const double> b) const override {
        run(a, x, b, dir_ == Sweep::forward ? Sweep::backward : Sweep::forward);
    }
    std::string name() const override { return "distributive"; }
    std::size_t size() const override { return n_; }

private:
    void run(const SparseMatrix& a, std::span<double> x, std::span<const double> b, Sweep dir) const {
        check(a, n_, x, b);
        const Vector r = residual(a, x, b);
        const Vector rhs = spmv(Nt_, r);
        Vector g(rhs.size(), 0.0);
        gs_sweep(AN_, g, rhs, diag_, dir);
        const Vector dx = spmv(N_, g);
        for (std::size_t i = 0; i < n_; ++i) x[i] += dx[i];
    }

    std::size_t n_;
    Sweep dir_;
    SparseMatrix N_, Nt_, AN_;
    Vector diag_;
};

class Schwarz final : public Smoother {
public:
    Schwarz(const SparseMatrix& a, std::vector<IndexSet> patches)
        : n_(a.nrows()), patches_(std::move(patches)), factors_(patches_.size()) {
        std::vector<char> covered(n_, 0);
        for (std::size_t p = 0; p < patches_.size(); ++p) {
            for (std::size_t i : patches_[p]) {
                NKAMG_CHECK_DIM(i < n_, "schwarz patch index");
                covered[i] = 1;
            }
            try {
                factors_[p] = LdltFactor(DenseMatrix::principal(a, patches_[p]));
            } catch (const SingularError& e) {
                throw SingularError("schwarz_multiplicative: singular patch " + std::to_string(p) + " ("
                                        + e.what() + ")",
                                    p);
            }
        }
        if (std::find(covered.begin(), covered.end(), 0) != covered.end())
            throw Error("schwarz_multiplicative: patches do not cover all DoFs");
    }
    void smooth(const SparseMatrix& a, std::span<double> x, std::span<const double> b) const override {
        check(a, n_, x, b);
        for (std::size_t p = 0; p < patches_.size(); ++p) solve_patch(a, x, b, p);
    }
    void smooth_adjoint(const SparseMatrix& a, std::span<double> x,
                        std::span<const double> b) const override {
        check(a, n_, x, b);
        for (std::size_t p = patches_.size(); p-- > 0;) solve_patch(a, x, b, p);
    }
    std::string name() const override { return "schwarz_multiplicative"; }
    std::size_t size() const override { return n_; }

private:
    void solve_patch(const SparseMatrix& a, std::span<double> x, std::span<const double> b,
                     std::size_t p) const {
        const auto& idx = patches_[p];
        Vector r(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const std::size_t i = idx[k];
            double s = b[i];
            auto c = a.row_cols(i);
            auto v = a.row_vals(i);
            for (std::size_t q = 0; q < c.size(); ++q) s -= v[q] * x[c[q]];
            r[k] = s;
        }
        factors_[p].solve_in_place(r);
        for (std::size_t k = 0; k < idx.size(); ++k) x[idx[k]] += r[k];
    }

    std::size_t n_;
    std::vector<IndexSet> patches_;
    std::vector<LdltFactor> factors_;
};

class Composite final : public Smoother {
public:
    explicit Composite(std::vector<SmootherPtr> parts) : parts_(std::move(parts)) {
        if (parts_.empty()) throw Error("composite: no smoothers given");
        for (const auto& p : parts_)
            NKAMG_CHECK_DIM(p->size() == parts_.front()->size(), "composite part sizes differ");
    }
    void smooth(const SparseMatrix& a, std::span<double> x, std::span<const double> b) const override {
        for (const auto& p : parts_) p->smooth(a, x, b);
    }
    void smooth_adjoint(const SparseMatrix& a, std::span<double> x,
                        std::span<const double> b) const override {
        for (auto it = parts_.rbegin(); it != parts_.rend(); ++it) (*it)->smooth_adjoint(a, x, b);
    }
    std::string name() const override {
        std::string s = "composite[";
        for (std::size_t k = 0; k < parts_.size(); ++k) s += (k ? "," : "") + parts_[k]->name();
        return s + "]";
    }
    std::size_t size() const override { return parts_.front()->size(); }

private:
    std::vector<SmootherPtr> parts_;
};

class Symmetrized final : public Smoother {
public:
    explicit Symmetrized(SmootherPtr inner) : inner_(std::move(inner)) {}
    void smooth(const SparseMatrix& a, std::span<double> x, std::span<const double> b) const override {
        inner_->smooth(a, x, b);
        inner_->smooth_adjoint(a, x, b);
    }
    void smooth_adjoint(const SparseMatrix& a, std::span<double> x,
                        std::span<const double> b) const override {
        smooth(a, x, b);
    }
    std::string name() const override { return "symmetrized(" + inner_->name() + ")"; }
    std::size_t size() const override { return inner_->size(); }

private:
    SmootherPtr inner_;
};

class Adjoint final : public Smoother {
public:
    explicit Adjoint(SmootherPtr inner) : inner_(std::move(inner)) {}
    void smooth(const SparseMatrix& a, std::span<double> x, std::span<const double> b) const override {
        inner_->smooth_adjoint(a, x, b);
    }
    void smooth_adjoint(const SparseMatrix& a, std::span<double> x,
                        std::span<const double> b) const override {
        inner_->smooth(a, x, b);
    }
    std::string name() const override { return "adjoint(" + inner_->name() + ")"; }
    std::size_t size() const override { return inner_->size(); }

private:
    SmootherPtr inner_;
};

} // namespace

SmootherPtr l1jacobi(const SparseMatrix& a, double omega) {
    return std::make_shared<L1Jacobi>(a, omega);
}
SmootherPtr gauss_seidel(const SparseMatrix& a, Sweep dir) {
    return std::make_shared<GaussSeidel>(a, dir);
}
SmootherPtr distributive(const SparseMatrix& a, const SparseMatrix& n, Sweep dir) {
    return std::make_shared<Distributive>(a, n, dir);
}
SmootherPtr distributive(const SparseMatrix& a, const NearKernelSet& nk, Sweep dir) {
    return distributive(a, nk.N, dir);
}
SmootherPtr schwarz_multiplicative(const SparseMatrix& a, std::vector<IndexSet> patches) {
    return std::make_shared<Schwarz>(a, std::move(patches));
}
SmootherPtr composite(std::vector<SmootherPtr> parts) {
    return std::make_shared<Composite>(std::move(parts));
}
SmootherPtr symmetrize(SmootherPtr s) { return std::make_shared<Symmetrized>(std::move(s)); }
SmootherPtr adjoint(SmootherPtr s) { return std::make_shared<Adjoint>(std::move(s)); }

Vector apply(const Smoother& s, const SparseMatrix& a, std::span<const double> x,
             std::span<const double> b) {
    Vector out(x.begin(), x.end());
    s.smooth(a, out, b);
    return out;
}

Vector apply_inverse(const Smoother& s, const SparseMatrix& a, std::span<const double> r) {
    Vector x(r.size(), 0.0);
    s.smooth(a, x, r);
    return x;
}

std::vector<IndexSet> star_patches(const SparseMatrix& g, std::size_t offset) {
    const SparseMatrix gt = g.transpose();
    std::vector<IndexSet> patches(g.ncols());
    for (std::size_t p = 0; p < g.ncols(); ++p) {
        auto c = gt.row_cols(p);
        patches[p].assign(c.begin(), c.end());
        patches[p].push_back(offset + p);
    }
    return patches;
}

DenseMatrix error_propagator(const Smoother& s, const SparseMatrix& a, bool adjoint) {
    const std::size_t n = a.nrows();
    DenseMatrix e(n, n);
    const Vector zero(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        Vector x(n, 0.0);
        x[j] = 1.0;
        if (adjoint)
            s.smooth_adjoint(a, x, zero);
        else
            s.smooth(a, x, zero);
        e.set_column(j, x);
    }
    return e;
}

} // namespace nkamg
