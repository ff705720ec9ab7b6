#include "nkamg/stokes.hpp"

#include <cmath>

#include "nkamg/rng.hpp"

namespace nkamg {

namespace {

SparseMatrix normalized_columns(const SparseMatrix& g) {
    SparseMatrix gt = g.transpose();
    std::vector<Triplet> t;
    for (std::size_t c = 0; c < gt.nrows(); ++c) {
        double s = 0.0;
        for (double v : gt.row_vals(c)) s += v * v;
        const double inv = s > 0.0 ? 1.0 / std::sqrt(s) : 0.0;
        auto rc = gt.row_cols(c);
        auto rv = gt.row_vals(c);
        for (std::size_t k = 0; k < rc.size(); ++k) t.push_back({rc[k], c, rv[k] * inv});
    }
    return SparseMatrix::from_triplets(g.nrows(), g.ncols(), t);
}

SparseMatrix block_diag(const SparseMatrix& a, const SparseMatrix& b) {
    return block2x2(a, SparseMatrix(a.nrows(), b.ncols()), SparseMatrix(b.nrows(), a.ncols()), b);
}

void check_stokes(const ProblemInstance& p) {
    if (p.mesh.topology != Topology::mac_periodic) throw Error("Stokes setup needs a MAC problem");
}

struct NodalParts {
    SparseMatrix A_N;
    SparseMatrix N;
    CFSplit split;
};

NodalParts nodal_parts(const ProblemInstance& p, const StokesOptions& opts) {
    NodalParts np;
    np.A_N = sptriple(p.G.transpose(), p.stiffness, p.G);
    np.N = normalized_columns(p.G);
    np.split = cf_split(np.A_N, opts.theta, opts.split_mode);
    return np;
}

} // namespace

std::vector<IndexSet> vanka_patches(const ProblemInstance& problem) {
    check_stokes(problem);
    return star_patches(problem.G, problem.G.nrows());
}

double power_estimate(const SparseMatrix& a, std::size_t steps, std::uint64_t seed) {
    Vector v = random_vector(a.nrows(), seed);
    double lambda = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double nv = norm2(v);
        if (nv == 0.0) return 0.0;
        for (double& x : v) x /= nv;
        Vector w = spmv(a, v);
        lambda = dot(v, w);
        v = std::move(w);
    }
    return lambda;
}

StokesSetup stokes_block_interpolation(const ProblemInstance& problem, const StokesOptions& opts) {
    check_stokes(problem);
    StokesSetup s;
    s.problem = problem;
    s.num_velocity = problem.G.nrows();
    s.num_pressure = problem.G.ncols();
    const NodalParts np = nodal_parts(problem, opts);
    s.A_N = np.A_N;
    s.split = np.split;
    BasisOptions bo;
    bo.path_theta = opts.path_theta;
    const SplitBasis be = form_split_basis(problem.stiffness, np.N, np.A_N, np.split, bo);
    s.P_e = ideal_interpolation(problem.stiffness, be, 1e-10, true);
    s.P_N = ideal_interpolation(np.A_N, classical_split(s.num_pressure, np.split), 1e-10, true);
    s.block_P = block_diag(s.P_e.P, s.P_N.P);
    s.variant = "block";
    return s;
}

SparseMatrix stokes_global_ideal(const StokesSetup& setup) {
    SplitBasis g;
    g.R = block_diag(setup.P_e.basis.R, setup.P_N.basis.R);
    g.S = block_diag(setup.P_e.basis.S, setup.P_N.basis.S);
    return ideal_interpolation(setup.problem.A, g, 1e-10, true).P;
}

StokesSetup stokes_sparse_variants(const ProblemInstance& problem, bool with_diagonal, int richardson_steps,
                                   double omega, const StokesOptions& opts) {
    check_stokes(problem);
    if (richardson_steps < 0 || richardson_steps > 1) throw Error("richardson_steps must be 0 or 1");
    StokesSetup s;
    s.problem = problem;
    s.num_velocity = problem.G.nrows();
    s.num_pressure = problem.G.ncols();
    const NodalParts np = nodal_parts(problem, opts);
    s.A_N = np.A_N;
    s.split = np.split;
    BasisOptions bo;
    bo.path_theta = opts.path_theta;
    bo.diagonal_paths = with_diagonal;
    s.P_e.basis = form_split_basis(problem.stiffness, np.N, np.A_N, np.split, bo);
    s.P_e.kind = InterpolationKind::tentative;
    s.P_e.P = s.P_e.basis.R.transpose();
    if (richardson_steps == 1) {
        const double rho = power_estimate(problem.stiffness);
        s.P_e.P = add(s.P_e.P, multiply(problem.stiffness, s.P_e.P), 1.0, -omega / rho);
    }
    s.P_N.basis = classical_split(s.num_pressure, np.split);
    s.P_N.kind = InterpolationKind::tentative;
    s.P_N.P = s.P_N.basis.R.transpose();
    if (richardson_steps == 1) {
        const double rho_n = power_estimate(np.A_N);
        s.P_N.P = add(s.P_N.P, multiply(np.A_N, s.P_N.P), 1.0, -omega / rho_n);
    }
    s.block_P = block_diag(s.P_e.P, s.P_N.P);
    s.variant = std::string(with_diagonal ? "diagonal_" : "") + (richardson_steps ? "P_smooth" : "no_P_smooth");
    return s;
}

TwoGridHierarchy stokes_hierarchy(const ProblemInstance& problem, const SparseMatrix& p) {
    const SmootherPtr vanka = schwarz_multiplicative(problem.A, vanka_patches(problem));
    return build_hierarchy(problem.A, p, vanka, adjoint(vanka), problem.nullspace);
}

} // namespace nkamg
