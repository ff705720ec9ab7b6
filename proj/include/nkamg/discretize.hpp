#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "nkamg/sparse.hpp"

namespace nkamg {

enum class DofKind { edge, node, velocity_x, velocity_y, pressure };
enum class Topology { quad_periodic, tri_dirichlet, mac_periodic };

const char* to_string(DofKind k);
const char* to_string(Topology t);

struct MeshInfo {
    Topology topology = Topology::quad_periodic;
    std::size_t nx = 0;
    std::size_t ny = 0;
    double h = 0.0;
    /// All mesh nodes, boundary included. For the MAC grid these are the cell centers.
    std::vector<std::array<double, 2>> node_coords;
    /// (tail, head) mesh nodes of every edge DoF (velocity DoFs on the MAC grid).
    std::vector<std::pair<std::size_t, std::size_t>> edge_endpoints;
    /// Mesh node of every column of the instance's G (interior nodes on Dirichlet meshes).
    std::vector<std::size_t> gradient_nodes;
};

struct ProblemInstance {
    SparseMatrix A;
    double beta = 0.0;
    std::vector<DofKind> dof_kind;
    MeshInfo mesh;
    /// Discrete gradient (edge DoFs x gradient_nodes). For the MAC grid it is the
    /// face-cell incidence and the pressure coupling block equals G / h.
    SparseMatrix G;
    SparseMatrix stiffness;
    SparseMatrix mass;
    /// Known kernel of A (periodic Stokes: constant u, constant v, constant p).
    std::vector<Vector> nullspace;

    std::size_t size() const { return A.nrows(); }
};

/// Lowest-order edge elements for curl-curl + beta * mass on a periodic nx x ny grid of
/// squares with side h = 1/nx. Edge (x, y) -> (x+1, y) is DoF x + nx*y; edge
/// (x, y) -> (x, y+1) is DoF nx*ny + x + nx*y.
ProblemInstance curlcurl_quad_periodic(std::size_t nx, std::size_t ny, double beta);

/// Same operator on squares split by the lower-left to upper-right diagonal, with
/// tangential Dirichlet conditions: edges lying on the boundary are eliminated.
ProblemInstance curlcurl_tri_dirichlet(std::size_t nx, std::size_t ny, double beta);

/// Periodic MAC Stokes system [[A_e, G/h], [G^T/h, 0]]: velocities first (all u then all v),
/// then one pressure per cell. u(i, j) sits between cells (i-1, j) and (i, j).
ProblemInstance stokes_mac_periodic(std::size_t nx, std::size_t ny);

/// G[e, n] = +1 at the head node, -1 at the tail node, over all mesh nodes.
SparseMatrix discrete_gradient(const MeshInfo& mesh);

/// Writes <prefix>.mtx (A) and <prefix>.meta (mesh parameters and one dof kind per line).
void write_problem(const std::string& prefix, const ProblemInstance& p);

} // namespace nkamg
