#include "nkamg/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace nkamg {

DenseMatrix::DenseMatrix(std::size_t nrows, std::size_t ncols, std::vector<double> values)
    : nrows_(nrows), ncols_(ncols), vals_(std::move(values)) {
    NKAMG_CHECK_DIM(vals_.size() == nrows_ * ncols_, "DenseMatrix value count");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::from_sparse(const SparseMatrix& a) {
    DenseMatrix m(a.nrows(), a.ncols());
    for (std::size_t i = 0; i < a.nrows(); ++i) {
        auto c = a.row_cols(i);
        auto v = a.row_vals(i);
        for (std::size_t k = 0; k < c.size(); ++k) m(i, c[k]) = v[k];
    }
    return m;
}

DenseMatrix DenseMatrix::principal(const SparseMatrix& a, std::span<const std::size_t> idx) {
    const std::size_t n = idx.size();
    DenseMatrix m(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        auto c = a.row_cols(idx[r]);
        auto v = a.row_vals(idx[r]);
        // idx is small; a merge against the sorted row would need idx sorted, so search it.
        for (std::size_t s = 0; s < n; ++s) {
            auto it = std::lower_bound(c.begin(), c.end(), idx[s]);
            if (it != c.end() && *it == idx[s]) m(r, s) = v[static_cast<std::size_t>(it - c.begin())];
        }
    }
    return m;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t(ncols_, nrows_);
    for (std::size_t i = 0; i < nrows_; ++i)
        for (std::size_t j = 0; j < ncols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double DenseMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : vals_) s += v * v;
    return std::sqrt(s);
}

Vector DenseMatrix::column(std::size_t j) const {
    Vector c(nrows_);
    for (std::size_t i = 0; i < nrows_; ++i) c[i] = (*this)(i, j);
    return c;
}

void DenseMatrix::set_column(std::size_t j, std::span<const double> v) {
    NKAMG_CHECK_DIM(v.size() == nrows_, "set_column length");
    for (std::size_t i = 0; i < nrows_; ++i) (*this)(i, j) = v[i];
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    NKAMG_CHECK_DIM(a.ncols() == b.nrows(), "dense product");
    DenseMatrix c(a.nrows(), b.ncols());
    for (std::size_t i = 0; i < a.nrows(); ++i)
        for (std::size_t k = 0; k < a.ncols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.ncols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    NKAMG_CHECK_DIM(a.nrows() == b.nrows() && a.ncols() == b.ncols(), "dense difference");
    DenseMatrix c = a;
    auto cv = c.values_mut();
    auto bv = b.values();
    for (std::size_t k = 0; k < cv.size(); ++k) cv[k] -= bv[k];
    return c;
}

Vector matvec(const DenseMatrix& a, std::span<const double> x) {
    NKAMG_CHECK_DIM(x.size() == a.ncols(), "dense matvec");
    Vector y(a.nrows(), 0.0);
    for (std::size_t i = 0; i < a.nrows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.ncols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    NKAMG_CHECK_DIM(a.nrows() == b.nrows() && a.ncols() == b.ncols(), "max_abs_diff");
    double m = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k)
        m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
    return m;
}

bool is_symmetric(const DenseMatrix& a, double rtol) {
    if (a.nrows() != a.ncols()) return false;
    double scale = 0.0;
    for (double v : a.values()) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < a.nrows(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(a(i, j) - a(j, i)) > rtol * scale) return false;
    return true;
}

SymmetricEigen symmetric_eigen(const DenseMatrix& b) {
    if (!is_symmetric(b, 1e-10)) throw Error("symmetric_eigen: matrix is not symmetric");
    const std::size_t n = b.nrows();
    DenseMatrix a = b;
    DenseMatrix v = DenseMatrix::identity(n);
    const double fro = b.frobenius_norm();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(off) <= 1e-15 * fro || off == 0.0) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0)
                                 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
    SymmetricEigen out{Vector(n), DenseMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

EigenPair smallest_eigpair(const DenseMatrix& b, double tol) {
    NKAMG_CHECK_DIM(b.nrows() == b.ncols() && b.nrows() > 0, "smallest_eigpair needs a square matrix");
    auto eig = symmetric_eigen(b);
    EigenPair pair{eig.values[0], eig.vectors.column(0)};
    const double nv = norm2(pair.vector);
    for (double& x : pair.vector) x /= nv;
    Vector r = matvec(b, pair.vector);
    axpy(-pair.lambda, pair.vector, r);
    const double res = norm2(r);
    if (res > tol * b.frobenius_norm() && res > 0.0)
        throw EigenConvergenceError("smallest_eigpair: residual " + std::to_string(res)
                                        + " above tolerance",
                                    std::move(pair));
    return pair;
}

LdltFactor::LdltFactor(const DenseMatrix& b, bool allow_singular)
    : n_(b.nrows()), l_(b), d_diag_(b.nrows(), 0.0), d_sub_(b.nrows(), 0.0), perm_(b.nrows()) {
    NKAMG_CHECK_DIM(b.nrows() == b.ncols(), "LdltFactor needs a square matrix");
    std::iota(perm_.begin(), perm_.end(), 0);
    const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
    const double tol = 1e-14 * b.frobenius_norm();
    // Only the lower triangle of w is referenced.
    DenseMatrix& w = l_;
    const std::size_t n = n_;
    auto sym = [&](std::size_t i, std::size_t j) { return i >= j ? w(i, j) : w(j, i); };

    auto swap_sym = [&](std::size_t p, std::size_t q) {
        if (p == q) return;
        if (p > q) std::swap(p, q);
        for (std::size_t j = 0; j < p; ++j) std::swap(w(p, j), w(q, j));
        std::swap(w(p, p), w(q, q));
        for (std::size_t j = p + 1; j < q; ++j) std::swap(w(j, p), w(q, j));
        for (std::size_t j = q + 1; j < n; ++j) std::swap(w(j, p), w(j, q));
        std::swap(perm_[p], perm_[q]);
    };
    auto singular = [&](std::size_t k, const char* kind) {
        return SingularError(std::string("LdltFactor: numerically singular ") + kind
                                 + " pivot at index " + std::to_string(perm_[k]),
                             perm_[k]);
    };

    std::vector<double> c0(n), c1(n);
    std::size_t k = 0;
    while (k < n) {
        const double absakk = std::abs(w(k, k));
        std::size_t imax = k;
        double colmax = 0.0;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(w(i, k)) > colmax) {
                colmax = std::abs(w(i, k));
                imax = i;
            }
        if (std::max(absakk, colmax) < tol || std::max(absakk, colmax) == 0.0) {
            if (!allow_singular) throw singular(k, "1x1");
            d_diag_[k] = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) w(i, k) = 0.0;
            ++dropped_;
            k += 1;
            continue;
        }
        bool two = false;
        std::size_t kp = k;
        if (absakk < alpha * colmax) {
            double rowmax = 0.0;
            for (std::size_t j = k; j < n; ++j)
                if (j != imax) rowmax = std::max(rowmax, std::abs(sym(imax, j)));
            if (absakk >= alpha * colmax * (colmax / rowmax)) {
                kp = k;
            } else if (std::abs(w(imax, imax)) >= alpha * rowmax) {
                kp = imax;
            } else {
                kp = imax;
                two = true;
            }
        }
        if (!two) {
            swap_sym(k, kp);
            const double d = w(k, k);
            if (std::abs(d) < tol) throw singular(k, "1x1");
            d_diag_[k] = d;
            for (std::size_t i = k + 1; i < n; ++i) c0[i] = w(i, k);
            for (std::size_t i = k + 1; i < n; ++i) {
                const double li = c0[i] / d;
                if (li != 0.0)
                    for (std::size_t j = k + 1; j <= i; ++j) w(i, j) -= li * c0[j];
                w(i, k) = li;
            }
            k += 1;
        } else {
            swap_sym(k + 1, kp);
            const double a = w(k, k), bb = w(k + 1, k), c = w(k + 1, k + 1);
            const double mid = 0.5 * (a + c);
            const double rad = std::sqrt(0.25 * (a - c) * (a - c) + bb * bb);
            if (std::min(std::abs(mid - rad), std::abs(mid + rad)) < tol)
                throw singular(k, "2x2");
            const double det = a * c - bb * bb;
            d_diag_[k] = a;
            d_diag_[k + 1] = c;
            d_sub_[k] = bb;
            for (std::size_t i = k + 2; i < n; ++i) {
                c0[i] = w(i, k);
                c1[i] = w(i, k + 1);
            }
            for (std::size_t i = k + 2; i < n; ++i) {
                const double l0 = (c * c0[i] - bb * c1[i]) / det;
                const double l1 = (a * c1[i] - bb * c0[i]) / det;
                if (l0 != 0.0 || l1 != 0.0)
                    for (std::size_t j = k + 2; j <= i; ++j) w(i, j) -= l0 * c0[j] + l1 * c1[j];
                w(i, k) = l0;
                w(i, k + 1) = l1;
            }
            w(k + 1, k) = 0.0;
            k += 2;
        }
    }
}

void LdltFactor::solve_in_place(std::span<double> x) const {
    NKAMG_CHECK_DIM(x.size() == n_, "LdltFactor::solve length");
    const std::size_t n = n_;
    Vector y(n);
    for (std::size_t k = 0; k < n; ++k) y[k] = x[perm_[k]];
    for (std::size_t i = 0; i < n; ++i) {
        double s = y[i];
        for (std::size_t j = 0; j < i; ++j) s -= l_(i, j) * y[j];
        y[i] = s;
    }
    for (std::size_t k = 0; k < n;) {
        if (k + 1 < n && d_sub_[k] != 0.0) {
            const double a = d_diag_[k], b = d_sub_[k], c = d_diag_[k + 1];
            const double det = a * c - b * b;
            const double y0 = y[k], y1 = y[k + 1];
            y[k] = (c * y0 - b * y1) / det;
            y[k + 1] = (a * y1 - b * y0) / det;
            k += 2;
        } else {
            y[k] = d_diag_[k] == 0.0 ? 0.0 : y[k] / d_diag_[k];
            k += 1;
        }
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= l_(j, ii) * y[j];
        y[ii] = s;
    }
    for (std::size_t k = 0; k < n; ++k) x[perm_[k]] = y[k];
}

std::vector<Vector> LdltFactor::null_vectors() const {
    std::vector<Vector> out;
    for (std::size_t k = 0; k < n_; ++k) {
        const bool in_2x2 = (k + 1 < n_ && d_sub_[k] != 0.0) || (k > 0 && d_sub_[k - 1] != 0.0);
        if (d_diag_[k] != 0.0 || in_2x2) continue;
        Vector y(n_, 0.0);
        y[k] = 1.0;
        for (std::size_t ii = k; ii-- > 0;) {
            double s = 0.0;
            for (std::size_t j = ii + 1; j <= k; ++j) s -= l_(j, ii) * y[j];
            y[ii] = s;
        }
        Vector x(n_);
        for (std::size_t q = 0; q < n_; ++q) x[perm_[q]] = y[q];
        out.push_back(std::move(x));
    }
    return out;
}

Vector LdltFactor::solve(std::span<const double> rhs) const {
    Vector x(rhs.begin(), rhs.end());
    solve_in_place(x);
    return x;
}

Vector dense_factor_solve(const DenseMatrix& b, std::span<const double> rhs) {
    NKAMG_CHECK_DIM(rhs.size() == b.nrows(), "dense_factor_solve rhs length");
    return LdltFactor(b).solve(rhs);
}

} // namespace nkamg
