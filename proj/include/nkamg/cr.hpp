#pragma once

#include <cstdint>
#include <string>

#include "nkamg/coarsen.hpp"
#include "nkamg/smoothers.hpp"

namespace nkamg {

enum class CRVariant { primary, s_relaxation, habituated };

const char* to_string(CRVariant v);

struct CRReport {
    double rho_estimate = 0.0;
    std::vector<double> per_iteration_norms;
    CRVariant variant = CRVariant::habituated;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    bool empty_fine_space = false;
    Vector final_error; // e_K in the full DoF space
};

/// Compatible relaxation from a seeded random error projected onto range(S):
///   primary:      e <- (I - Q_S B Q_S A) e
///   s_relaxation: e_S <- (I - B_S A_S) e_S with A_S = S^T A S; B_S comes from
///                 s_smoother (built on A_S) or, when null, B_S = S^T B S
///   habituated:   e <- Q_S (I - B A) Q_S e
/// rho = (|e_K| / |e_K0|)^(1/(K-K0)) with K0 = ceil(K/2).
CRReport cr_rate(const SparseMatrix& a, const SplitBasis& basis, const Smoother& smoother, CRVariant variant,
                 std::size_t iters = 30, std::uint64_t seed = 7, const Smoother* s_smoother = nullptr);

/// |e_K| per DoF.
Vector cr_error_field(const CRReport& report);

/// Mean |e| over the flagged DoFs divided by the mean over the rest.
double masked_mean_ratio(const Vector& field, const std::vector<char>& flagged);

/// Edge DoFs with an endpoint on the Dirichlet boundary (fewer than two entries in G's row).
std::vector<char> boundary_adjacent(const ProblemInstance& p);

} // namespace nkamg
