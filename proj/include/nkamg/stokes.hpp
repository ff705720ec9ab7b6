#pragma once

#include <cstdint>
#include <string>

#include "nkamg/coarsen.hpp"
#include "nkamg/discretize.hpp"
#include "nkamg/smoothers.hpp"
#include "nkamg/solver.hpp"

namespace nkamg {

struct StokesOptions {
    double theta = 0.25;
    StrengthMode split_mode = StrengthMode::negative;
    /// Threshold of the |a|-strength node graph used to match velocity paths.
    double path_theta = 0.2;
};

struct StokesSetup {
    ProblemInstance problem;
    std::size_t num_velocity = 0;
    std::size_t num_pressure = 0;
    SparseMatrix A_N;        // G^T A_e G
    CFSplit split;           // nodal (pressure) split
    Interpolation P_e;       // velocities
    Interpolation P_N;       // pressures
    SparseMatrix block_P;
    SparseMatrix global_P;   // empty unless built
    std::string variant;
};

/// Velocity and pressure interpolation from one nodal split of A_N = G^T A_e G; the velocity
/// near-kernel columns are the normalized columns of G (pressure stars).
StokesSetup stokes_block_interpolation(const ProblemInstance& problem, const StokesOptions& opts = {});

/// Ideal interpolation on the full saddle matrix with R and S assembled from both blocks.
SparseMatrix stokes_global_ideal(const StokesSetup& setup);

/// Tentative block R^T (velocity paths, optionally with diagonal paths; pressure injection).
/// With richardson_steps = 1 each block is smoothed once by (I - omega A / rho), using A_e
/// and A_N respectively and rho from 10 power iterations.
StokesSetup stokes_sparse_variants(const ProblemInstance& problem, bool with_diagonal, int richardson_steps,
                                   double omega = 2.0 / 3.0, const StokesOptions& opts = {});

/// Vanka patches: each pressure with the velocities of its continuity stencil.
std::vector<IndexSet> vanka_patches(const ProblemInstance& problem);

/// Largest-eigenvalue estimate of a symmetric matrix by power iteration from a seeded start.
double power_estimate(const SparseMatrix& a, std::size_t steps = 10, std::uint64_t seed = 11);

/// Two-grid hierarchy with one forward Vanka sweep before and one reversed sweep after.
TwoGridHierarchy stokes_hierarchy(const ProblemInstance& problem, const SparseMatrix& p);

} // namespace nkamg
