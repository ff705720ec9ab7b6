#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nkamg/coarsen.hpp"
#include "nkamg/cr.hpp"
#include "nkamg/discretize.hpp"
#include "nkamg/nearkernel.hpp"
#include "nkamg/smoothers.hpp"
#include "nkamg/solver.hpp"
#include "nkamg/stokes.hpp"

namespace nkamg {

/// Everything the curl-curl experiments need from one problem instance.
struct CurlCurlPipeline {
    ProblemInstance problem;
    NearKernelSet nk;
    SparseMatrix A_N;
    CFSplit split;
    SplitBasis basis;
    Interpolation P;
    SmootherPtr smoother; // distributive then L1-Jacobi
};

struct PipelineOptions {
    std::size_t m = 0;      // 0: 2 on quad meshes, 3 on triangle meshes
    double eps = 0.0;       // 0: default_eps(problem)
    double theta = 0.25;
    double omega = 0.5;
};

std::size_t default_m(Topology t);

CurlCurlPipeline build_curlcurl_pipeline(ProblemInstance problem, const PipelineOptions& opts = {});

/// Two-grid hierarchy with pre = post = smoother, or the symmetrized smoother on both sides.
TwoGridHierarchy curlcurl_hierarchy(const CurlCurlPipeline& pl, const SparseMatrix& p, bool symmetrized);

enum class Family { curlcurl_quad_periodic, curlcurl_tri_dirichlet, stokes_mac };

struct ExperimentConfig {
    Family family = Family::curlcurl_quad_periodic;
    std::vector<std::pair<std::size_t, std::size_t>> sizes;
    double beta = 0.01;
    std::vector<std::string> methods;
    double tol = 1e-6;
    std::uint64_t seed = 7;
    double omega = 0.5;
    bool symmetrize = true;
    double theta = 0.25;
    std::size_t m = 0;
    double eps = 0.0;
    std::size_t cr_iters = 30;
    std::size_t max_iter = 500;
    double richardson_omega = 2.0 / 3.0;
    StrengthMode stokes_split = StrengthMode::absolute;         // block and global P
    StrengthMode stokes_sparse_split = StrengthMode::negative;  // sparse variants
    std::string source_text; // the text the config was parsed from
};

/// Parses `key = value` lines; `#` starts a comment, lists are comma separated.
/// Throws Error("line N: ...") on unknown keys, malformed values or a missing family.
ExperimentConfig validate_config(const std::string& text);

const std::vector<std::string>& known_methods();

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct ExperimentResult {
    CsvTable table;
    std::vector<std::string> summary;
    std::vector<std::string> check_failures;
};

/// Runs every size and method; failures are recorded in the row's status column.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_csv(std::ostream& out, const CsvTable& t);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

} // namespace nkamg
