#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "nkamg/discretize.hpp"
#include "nkamg/sparse.hpp"

namespace nkamg {

using IndexSet = std::vector<std::size_t>;

struct NearKernelSet {
    SparseMatrix N;                 // n x L, unit columns
    std::vector<IndexSet> supports; // sorted support set per column
    std::size_t m = 0;
    double eps = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> anchor; // (i, j) that produced each column
    Vector lambda;                  // local eigenvalue of each column

    std::size_t size() const { return supports.size(); }
};

/// Symmetric pattern adjacency with the diagonal removed.
using Graph = std::vector<std::vector<std::size_t>>;

/// Graph distances from source, truncated at max_depth; unreachable entries hold SIZE_MAX.
std::vector<std::size_t> bounded_distances(const Graph& g, std::size_t source, std::size_t max_depth);

/// For each j at distance exactly m from i: all vertices on i-j geodesics.
/// Identical sets are reported once, in order of the first j producing them.
std::vector<std::pair<std::size_t, IndexSet>> diameter_sets_with_ends(const Graph& g, std::size_t i,
                                                                      std::size_t m);
std::vector<IndexSet> diameter_sets(const SparseMatrix& a, std::size_t i, std::size_t m);

/// Smallest local eigenpair on every diameter-m set; columns with lambda <= eps are kept.
/// Patches already seen from an earlier (i, j) are skipped.
NearKernelSet find_local_near_kernels(const SparseMatrix& a, std::size_t m, double eps);

/// One column per support set; each column's largest-magnitude entry made positive
/// (lowest index wins ties).
NearKernelSet dedupe_and_orient(const NearKernelSet& nk);

/// beta times the largest absolute row sum of the mass matrix, floored at 1e-12.
double default_eps(const ProblemInstance& p);

/// Writes <prefix>_N.mtx and <prefix>_supports.txt.
void write_near_kernels(const std::string& prefix, const NearKernelSet& nk);

} // namespace nkamg
