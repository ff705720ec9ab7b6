#include "nkamg/cr.hpp"

#include <cmath>

#include "nkamg/rng.hpp"

namespace nkamg {

const char* to_string(CRVariant v) {
    switch (v) {
    case CRVariant::primary: return "primary";
    case CRVariant::s_relaxation: return "s_relaxation";
    case CRVariant::habituated: return "habituated";
    }
    return "?";
}

CRReport cr_rate(const SparseMatrix& a, const SplitBasis& basis, const Smoother& smoother, CRVariant variant,
                 std::size_t iters, std::uint64_t seed, const Smoother* s_smoother) {
    if (iters < 5) throw Error("cr_rate: at least 5 iterations required");
    NKAMG_CHECK_DIM(basis.S.nrows() == a.nrows(), "cr_rate: basis size");
    const std::size_t n = a.nrows();
    CRReport rep;
    rep.variant = variant;
    rep.iterations = iters;
    rep.seed = seed;
    rep.final_error.assign(n, 0.0);
    if (basis.S.ncols() == 0) {
        rep.empty_fine_space = true;
        return rep;
    }
    const SparseMatrix& s = basis.S;
    const SparseMatrix st = s.transpose();
    auto project = [&](const Vector& v) { return spmv(s, spmv(st, v)); };

    Vector e = project(random_vector(n, seed));
    Vector es = spmv(st, e);
    SparseMatrix a_s;
    if (variant == CRVariant::s_relaxation) a_s = sptriple(st, a, s);
    const Vector zero_s(es.size(), 0.0);
    const Vector zero(n, 0.0);

    rep.per_iteration_norms.push_back(norm2(e));
    for (std::size_t k = 0; k < iters; ++k) {
        switch (variant) {
        case CRVariant::primary: {
            const Vector y = project(spmv(a, e));
            const Vector z = project(apply_inverse(smoother, a, y));
            axpy(-1.0, z, e);
            break;
        }
        case CRVariant::habituated: {
            smoother.smooth(a, e, zero);
            e = project(e);
            break;
        }
        case CRVariant::s_relaxation: {
            if (s_smoother) {
                s_smoother->smooth(a_s, es, zero_s);
            } else {
                const Vector y = spmv(s, spmv(a_s, es));
                axpy(-1.0, spmv(st, apply_inverse(smoother, a, y)), es);
            }
            e = spmv(s, es);
            break;
        }
        }
        rep.per_iteration_norms.push_back(norm2(e));
    }
    const std::size_t k0 = (iters + 1) / 2;
    const double num = rep.per_iteration_norms[iters];
    const double den = rep.per_iteration_norms[k0];
    rep.rho_estimate = den == 0.0 ? 0.0 : std::pow(num / den, 1.0 / static_cast<double>(iters - k0));
    rep.final_error = e;
    return rep;
}

Vector cr_error_field(const CRReport& report) {
    Vector f(report.final_error.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::abs(report.final_error[i]);
    return f;
}

double masked_mean_ratio(const Vector& field, const std::vector<char>& flagged) {
    NKAMG_CHECK_DIM(field.size() == flagged.size(), "masked_mean_ratio");
    double s1 = 0.0, s0 = 0.0;
    std::size_t n1 = 0, n0 = 0;
    for (std::size_t i = 0; i < field.size(); ++i)
        if (flagged[i]) {
            s1 += field[i];
            ++n1;
        } else {
            s0 += field[i];
            ++n0;
        }
    if (n1 == 0 || n0 == 0 || s0 == 0.0) return std::nan("");
    return (s1 / static_cast<double>(n1)) / (s0 / static_cast<double>(n0));
}

std::vector<char> boundary_adjacent(const ProblemInstance& p) {
    std::vector<char> flag(p.G.nrows(), 0);
    for (std::size_t e = 0; e < p.G.nrows(); ++e) flag[e] = p.G.row_cols(e).size() < 2 ? 1 : 0;
    return flag;
}

} // namespace nkamg
