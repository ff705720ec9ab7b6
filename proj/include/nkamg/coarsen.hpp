#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nkamg/dense.hpp"
#include "nkamg/discretize.hpp"
#include "nkamg/nearkernel.hpp"
#include "nkamg/sparse.hpp"

namespace nkamg {

/// Which off-diagonal entries count as strong connections.
enum class StrengthMode {
    negative, // -a_ij >= theta * max_k(-a_ik), classical
    absolute, // |a_ij| >= theta * max_k |a_ik|
};

struct CFSplit {
    IndexSet coarse;
    IndexSet fine;
    double strength_threshold = 0.25;
};

/// Symmetrized strong-connection graph.
Graph strength_graph(const SparseMatrix& a, double theta, StrengthMode mode = StrengthMode::negative);

/// Ruge-Stueben first pass, ties to the lowest index, then F points without a strong C
/// neighbor are promoted. Nodes without strong connections are coarse.
CFSplit cf_split(const SparseMatrix& a_n, double theta = 0.25,
                 StrengthMode mode = StrengthMode::negative);

struct PathRecord {
    std::size_t i, k, j;       // coarse node, intermediate node, coarse node
    std::size_t dof1, dof2;    // fine DoFs linking i-k and k-j
    int s1, s2;                // signs of the R entries at dof1, dof2
    bool diagonal = false;     // added by the diagonal matching (may share DoFs)
};

struct SplitBasis {
    SparseMatrix R;            // n_c x n
    SparseMatrix S;            // n x n_s, Euclidean columns
    IndexSet fine_dofs;        // DoF of each S column
    std::vector<PathRecord> paths;
    std::vector<std::pair<std::size_t, std::size_t>> skipped_pairs;

    std::size_t num_coarse() const { return R.nrows(); }
    std::size_t num_fine() const { return S.ncols(); }
};

struct BasisOptions {
    /// Node adjacency used to find distance-two coarse pairs: the pattern of A_N
    /// (entries below 1e-10 max|A_N| ignored) when path_theta <= 0, otherwise
    /// |a_ij| >= path_theta * max_k |a_ik|.
    double path_theta = 0.0;
    /// Also match coarse nodes that are adjacent but have disjoint supports through a
    /// common support-sharing neighbor; these rows may reuse claimed DoFs.
    bool diagonal_paths = false;
};

/// Path matching between distance-two coarse nodes. Column l of N is node l of a_n.
SplitBasis form_split_basis(const SparseMatrix& a, const SparseMatrix& n, const SparseMatrix& a_n,
                            const CFSplit& split, const BasisOptions& opts = {});
SplitBasis form_split_basis(const SparseMatrix& a, const NearKernelSet& nk, const CFSplit& split,
                            const BasisOptions& opts = {});

/// Classical splitting R = rows e_c, S = columns e_f.
SplitBasis classical_split(std::size_t n, const CFSplit& split);

/// Coarse edge = adjacent colinear fine edge pair / sqrt(2); S = the remaining edges.
SplitBasis geometric_split(const MeshInfo& mesh);

enum class InterpolationKind { ideal, classical_ideal, tentative, geometric };

struct Interpolation {
    SparseMatrix P;
    SplitBasis basis;
    InterpolationKind kind = InterpolationKind::ideal;
};

/// P = (I - S (S^T A S)^{-1} S^T A) R^T, one solve per coarse column.
/// With allow_singular a singular S^T A S is handled as a pseudo-inverse: right-hand sides
/// and solutions are projected onto the complement of its null space.
Interpolation ideal_interpolation(const SparseMatrix& a, const SplitBasis& basis, double tol = 1e-10,
                                  bool allow_singular = false);

Interpolation classical_ideal(const SparseMatrix& a, double theta = 0.25,
                              StrengthMode mode = StrengthMode::negative);

/// Lowest-order edge-element prolongation from the (nx/2, ny/2) periodic quad mesh.
SparseMatrix nedelec_prolongation(const MeshInfo& fine);

/// (nnz(A) + nnz(A_c)) / nnz(A), counting entries with |a| >= 1e-13 max|a| of each matrix.
double operator_complexity(const SparseMatrix& a, const SparseMatrix& a_c);

/// Sine of the largest principal angle between the column spaces.
double subspace_distance(const SparseMatrix& p1, const SparseMatrix& p2);

/// Writes <prefix>_R.mtx, <prefix>_S.mtx and <prefix>_paths.txt (i k j DoF1 s1 DoF2 s2).
void write_split_basis(const std::string& prefix, const SplitBasis& basis);

} // namespace nkamg
