#include "nkamg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace nkamg {

SparseMatrix::SparseMatrix(std::size_t nrows, std::size_t ncols)
    : nrows_(nrows), ncols_(ncols), offsets_(nrows + 1, 0) {}

SparseMatrix::SparseMatrix(std::size_t nrows, std::size_t ncols,
                           std::vector<std::size_t> row_offsets,
                           std::vector<std::size_t> col_indices, std::vector<double> values)
    : nrows_(nrows), ncols_(ncols), offsets_(std::move(row_offsets)),
      cols_(std::move(col_indices)), vals_(std::move(values)) {
    validate();
}

void SparseMatrix::validate() const {
    if (offsets_.size() != nrows_ + 1 || offsets_.front() != 0 || offsets_.back() != cols_.size()
        || cols_.size() != vals_.size())
        throw Error("SparseMatrix: inconsistent CSR array lengths");
    for (std::size_t i = 0; i < nrows_; ++i) {
        if (offsets_[i] > offsets_[i + 1]) throw Error("SparseMatrix: row offsets decrease");
        for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
            if (cols_[k] >= ncols_) throw Error("SparseMatrix: column index out of range");
            if (k > offsets_[i] && cols_[k] <= cols_[k - 1])
                throw Error("SparseMatrix: columns not strictly increasing in row "
                            + std::to_string(i));
        }
    }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t nrows, std::size_t ncols,
                                         std::span<const Triplet> triplets) {
    std::vector<std::size_t> count(nrows + 1, 0);
    for (const auto& t : triplets) {
        if (t.row >= nrows || t.col >= ncols) throw Error("from_triplets: index out of range");
        ++count[t.row + 1];
    }
    std::partial_sum(count.begin(), count.end(), count.begin());
    // Stable bucket by row keeps the input order of duplicates.
    std::vector<std::size_t> order(triplets.size());
    {
        auto next = count;
        for (std::size_t k = 0; k < triplets.size(); ++k) order[next[triplets[k].row]++] = k;
    }
    std::vector<std::size_t> offsets(nrows + 1, 0), cols;
    std::vector<double> vals;
    cols.reserve(triplets.size());
    vals.reserve(triplets.size());
    std::vector<std::size_t> rowbuf;
    for (std::size_t i = 0; i < nrows; ++i) {
        rowbuf.assign(order.begin() + static_cast<std::ptrdiff_t>(count[i]),
                      order.begin() + static_cast<std::ptrdiff_t>(count[i + 1]));
        std::stable_sort(rowbuf.begin(), rowbuf.end(), [&](std::size_t a, std::size_t b) {
            return triplets[a].col < triplets[b].col;
        });
        for (std::size_t k : rowbuf) {
            const auto& t = triplets[k];
            if (cols.size() > offsets[i] && cols.back() == t.col)
                vals.back() += t.value;
            else {
                cols.push_back(t.col);
                vals.push_back(t.value);
            }
        }
        offsets[i + 1] = cols.size();
    }
    return SparseMatrix(nrows, ncols, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
    std::vector<std::size_t> offsets(n + 1), cols(n);
    std::iota(offsets.begin(), offsets.end(), 0);
    std::iota(cols.begin(), cols.end(), 0);
    return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> d) {
    const std::size_t n = d.size();
    std::vector<std::size_t> offsets(n + 1), cols(n);
    std::iota(offsets.begin(), offsets.end(), 0);
    std::iota(cols.begin(), cols.end(), 0);
    return SparseMatrix(n, n, std::move(offsets), std::move(cols),
                        std::vector<double>(d.begin(), d.end()));
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
    auto c = row_cols(i);
    auto it = std::lower_bound(c.begin(), c.end(), j);
    if (it == c.end() || *it != j) return 0.0;
    return vals_[offsets_[i] + static_cast<std::size_t>(it - c.begin())];
}

bool SparseMatrix::contains(std::size_t i, std::size_t j) const {
    auto c = row_cols(i);
    return std::binary_search(c.begin(), c.end(), j);
}

SparseMatrix SparseMatrix::transpose() const {
    std::vector<std::size_t> offsets(ncols_ + 1, 0);
    for (std::size_t c : cols_) ++offsets[c + 1];
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    std::vector<std::size_t> cols(nnz());
    std::vector<double> vals(nnz());
    auto next = offsets;
    for (std::size_t i = 0; i < nrows_; ++i)
        for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
            const std::size_t dst = next[cols_[k]]++;
            cols[dst] = i;
            vals[dst] = vals_[k];
        }
    return SparseMatrix(ncols_, nrows_, std::move(offsets), std::move(cols), std::move(vals));
}

Vector SparseMatrix::diagonal_values() const {
    Vector d(std::min(nrows_, ncols_), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(i, i);
    return d;
}

namespace {

double row_dot(const SparseMatrix& a, std::size_t i, std::span<const double> x) {
    double s = 0.0;
    auto c = a.row_cols(i);
    auto v = a.row_vals(i);
    for (std::size_t k = 0; k < c.size(); ++k) s += v[k] * x[c[k]];
    return s;
}

// Row i of a*b, accumulated densely in the order dictated by a's row then b's rows.
struct RowAccumulator {
    explicit RowAccumulator(std::size_t ncols) : acc(ncols, 0.0), mark(ncols, npos) {}

    void compute(const SparseMatrix& a, const SparseMatrix& b, std::size_t i) {
        touched.clear();
        auto ac = a.row_cols(i);
        auto av = a.row_vals(i);
        for (std::size_t ka = 0; ka < ac.size(); ++ka) {
            auto bc = b.row_cols(ac[ka]);
            auto bv = b.row_vals(ac[ka]);
            for (std::size_t kb = 0; kb < bc.size(); ++kb) {
                const std::size_t j = bc[kb];
                if (mark[j] != i) {
                    mark[j] = i;
                    acc[j] = 0.0;
                    touched.push_back(j);
                }
                acc[j] += av[ka] * bv[kb];
            }
        }
        std::sort(touched.begin(), touched.end());
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::vector<double> acc;
    std::vector<std::size_t> mark;
    std::vector<std::size_t> touched;
};

void check_product(const SparseMatrix& a, const SparseMatrix& b) {
    NKAMG_CHECK_DIM(a.ncols() == b.nrows(),
                    "product " + std::to_string(a.nrows()) + "x" + std::to_string(a.ncols())
                        + " * " + std::to_string(b.nrows()) + "x" + std::to_string(b.ncols()));
}

} // namespace

namespace serial {

Vector spmv(const SparseMatrix& a, std::span<const double> x) {
    NKAMG_CHECK_DIM(x.size() == a.ncols(), "spmv input length");
    Vector y(a.nrows());
    for (std::size_t i = 0; i < a.nrows(); ++i) y[i] = row_dot(a, i, x);
    return y;
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
    check_product(a, b);
    RowAccumulator work(b.ncols());
    std::vector<std::size_t> offsets(a.nrows() + 1, 0), cols;
    std::vector<double> vals;
    for (std::size_t i = 0; i < a.nrows(); ++i) {
        work.compute(a, b, i);
        for (std::size_t j : work.touched) {
            cols.push_back(j);
            vals.push_back(work.acc[j]);
        }
        offsets[i + 1] = cols.size();
    }
    return SparseMatrix(a.nrows(), b.ncols(), std::move(offsets), std::move(cols),
                        std::move(vals));
}

SparseMatrix sptriple(const SparseMatrix& r, const SparseMatrix& a, const SparseMatrix& p) {
    return serial::multiply(serial::multiply(r, a), p);
}

} // namespace serial

Vector spmv(const SparseMatrix& a, std::span<const double> x) {
    Vector y(a.nrows());
    spmv_into(a, x, y);
    return y;
}

void spmv_into(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
    NKAMG_CHECK_DIM(x.size() == a.ncols(), "spmv input length");
    NKAMG_CHECK_DIM(y.size() == a.nrows(), "spmv output length");
    const auto n = static_cast<std::ptrdiff_t>(a.nrows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        y[static_cast<std::size_t>(i)] = row_dot(a, static_cast<std::size_t>(i), x);
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
    check_product(a, b);
    const std::size_t n = a.nrows();
    std::vector<std::vector<std::size_t>> row_cols(n);
    std::vector<std::vector<double>> row_vals(n);
#pragma omp parallel
    {
        RowAccumulator work(b.ncols());
#pragma omp for schedule(dynamic, 64)
        for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(n); ++si) {
            const auto i = static_cast<std::size_t>(si);
            work.compute(a, b, i);
            row_cols[i] = work.touched;
            row_vals[i].resize(work.touched.size());
            for (std::size_t k = 0; k < work.touched.size(); ++k)
                row_vals[i][k] = work.acc[work.touched[k]];
        }
    }
    std::vector<std::size_t> offsets(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] = offsets[i] + row_cols[i].size();
    std::vector<std::size_t> cols(offsets[n]);
    std::vector<double> vals(offsets[n]);
    for (std::size_t i = 0; i < n; ++i) {
        std::copy(row_cols[i].begin(), row_cols[i].end(),
                  cols.begin() + static_cast<std::ptrdiff_t>(offsets[i]));
        std::copy(row_vals[i].begin(), row_vals[i].end(),
                  vals.begin() + static_cast<std::ptrdiff_t>(offsets[i]));
    }
    return SparseMatrix(n, b.ncols(), std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix sptriple(const SparseMatrix& r, const SparseMatrix& a, const SparseMatrix& p) {
    check_product(r, a);
    check_product(a, p);
    return multiply(multiply(r, a), p);
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
    NKAMG_CHECK_DIM(a.nrows() == b.nrows() && a.ncols() == b.ncols(), "add");
    std::vector<std::size_t> offsets(a.nrows() + 1, 0), cols;
    std::vector<double> vals;
    for (std::size_t i = 0; i < a.nrows(); ++i) {
        auto ac = a.row_cols(i), bc = b.row_cols(i);
        auto av = a.row_vals(i), bv = b.row_vals(i);
        std::size_t ka = 0, kb = 0;
        while (ka < ac.size() || kb < bc.size()) {
            if (kb == bc.size() || (ka < ac.size() && ac[ka] < bc[kb])) {
                cols.push_back(ac[ka]);
                vals.push_back(alpha * av[ka++]);
            } else if (ka == ac.size() || bc[kb] < ac[ka]) {
                cols.push_back(bc[kb]);
                vals.push_back(beta * bv[kb++]);
            } else {
                cols.push_back(ac[ka]);
                vals.push_back(alpha * av[ka++] + beta * bv[kb++]);
            }
        }
        offsets[i + 1] = cols.size();
    }
    return SparseMatrix(a.nrows(), a.ncols(), std::move(offsets), std::move(cols),
                        std::move(vals));
}

SparseMatrix scaled(const SparseMatrix& a, double alpha) {
    SparseMatrix out = a;
    for (double& v : out.values_mut()) v *= alpha;
    return out;
}

SparseMatrix drop_small(const SparseMatrix& a, double threshold) {
    std::vector<std::size_t> offsets(a.nrows() + 1, 0), cols;
    std::vector<double> vals;
    for (std::size_t i = 0; i < a.nrows(); ++i) {
        auto c = a.row_cols(i);
        auto v = a.row_vals(i);
        for (std::size_t k = 0; k < c.size(); ++k)
            if (std::abs(v[k]) >= threshold) {
                cols.push_back(c[k]);
                vals.push_back(v[k]);
            }
        offsets[i + 1] = cols.size();
    }
    return SparseMatrix(a.nrows(), a.ncols(), std::move(offsets), std::move(cols),
                        std::move(vals));
}

std::size_t count_significant(const SparseMatrix& a, double rel) {
    const double cut = rel * max_abs(a);
    return static_cast<std::size_t>(std::count_if(a.values().begin(), a.values().end(),
                                                  [&](double v) { return std::abs(v) >= cut && v != 0.0; }));
}

double max_abs(const SparseMatrix& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

double frobenius_norm(const SparseMatrix& a) {
    double s = 0.0;
    for (double v : a.values()) s += v * v;
    return std::sqrt(s);
}

bool is_symmetric(const SparseMatrix& a, double rtol) {
    if (a.nrows() != a.ncols()) return false;
    const double tol = rtol * max_abs(a);
    for (std::size_t i = 0; i < a.nrows(); ++i) {
        auto c = a.row_cols(i);
        auto v = a.row_vals(i);
        for (std::size_t k = 0; k < c.size(); ++k)
            if (std::abs(v[k] - a.at(c[k], i)) > tol) return false;
    }
    return true;
}

SparseMatrix select_rows(const SparseMatrix& a, std::span<const std::size_t> rows) {
    std::vector<std::size_t> offsets(rows.size() + 1, 0), cols;
    std::vector<double> vals;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        NKAMG_CHECK_DIM(rows[r] < a.nrows(), "select_rows index");
        auto c = a.row_cols(rows[r]);
        auto v = a.row_vals(rows[r]);
        cols.insert(cols.end(), c.begin(), c.end());
        vals.insert(vals.end(), v.begin(), v.end());
        offsets[r + 1] = cols.size();
    }
    return SparseMatrix(rows.size(), a.ncols(), std::move(offsets), std::move(cols),
                        std::move(vals));
}

SparseMatrix select_columns(const SparseMatrix& a, std::span<const std::size_t> cols) {
    return select_rows(a.transpose(), cols).transpose();
}

SparseMatrix block2x2(const SparseMatrix& a, const SparseMatrix& b, const SparseMatrix& c,
                      const SparseMatrix& d) {
    const std::size_t r0 = std::max(a.nrows(), b.nrows());
    const std::size_t r1 = std::max(c.nrows(), d.nrows());
    const std::size_t c0 = std::max(a.ncols(), c.ncols());
    const std::size_t c1 = std::max(b.ncols(), d.ncols());
    std::vector<Triplet> t;
    auto put = [&](const SparseMatrix& m, std::size_t ro, std::size_t co) {
        if (m.nrows() == 0 || m.ncols() == 0) return;
        for (std::size_t i = 0; i < m.nrows(); ++i) {
            auto cc = m.row_cols(i);
            auto vv = m.row_vals(i);
            for (std::size_t k = 0; k < cc.size(); ++k) t.push_back({ro + i, co + cc[k], vv[k]});
        }
    };
    put(a, 0, 0);
    put(b, 0, c0);
    put(c, r0, 0);
    put(d, r0, c0);
    return SparseMatrix::from_triplets(r0 + r1, c0 + c1, t);
}

std::vector<std::vector<std::size_t>> pattern_graph(const SparseMatrix& a) {
    NKAMG_CHECK_DIM(a.nrows() == a.ncols(), "pattern_graph needs a square matrix");
    std::vector<std::vector<std::size_t>> adj(a.nrows());
    for (std::size_t i = 0; i < a.nrows(); ++i)
        for (std::size_t j : a.row_cols(i))
            if (j != i) {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
    for (auto& l : adj) {
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
    }
    return adj;
}

double dot(std::span<const double> x, std::span<const double> y) {
    NKAMG_CHECK_DIM(x.size() == y.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    NKAMG_CHECK_DIM(x.size() == y.size(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

} // namespace nkamg
