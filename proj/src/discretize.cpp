#include "nkamg/discretize.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "nkamg/mmio.hpp"

namespace nkamg {

const char* to_string(DofKind k) {
    switch (k) {
    case DofKind::edge: return "edge";
    case DofKind::node: return "node";
    case DofKind::velocity_x: return "velocity_x";
    case DofKind::velocity_y: return "velocity_y";
    case DofKind::pressure: return "pressure";
    }
    return "?";
}

const char* to_string(Topology t) {
    switch (t) {
    case Topology::quad_periodic: return "quad_periodic";
    case Topology::tri_dirichlet: return "tri_dirichlet";
    case Topology::mac_periodic: return "mac_periodic";
    }
    return "?";
}

namespace {

void check_size(std::size_t nx, std::size_t ny) {
    if (nx < 2 || ny < 2) throw Error("mesh needs at least 2x2 elements");
}

} // namespace

SparseMatrix discrete_gradient(const MeshInfo& mesh) {
    std::vector<Triplet> t;
    t.reserve(2 * mesh.edge_endpoints.size());
    for (std::size_t e = 0; e < mesh.edge_endpoints.size(); ++e) {
        const auto [tail, head] = mesh.edge_endpoints[e];
        t.push_back({e, tail, -1.0});
        t.push_back({e, head, 1.0});
    }
    return SparseMatrix::from_triplets(mesh.edge_endpoints.size(), mesh.node_coords.size(), t);
}

ProblemInstance curlcurl_quad_periodic(std::size_t nx, std::size_t ny, double beta) {
    check_size(nx, ny);
    if (beta < 0.0) throw Error("beta must be nonnegative");
    const double h = 1.0 / static_cast<double>(nx);
    const std::size_t nn = nx * ny;
    auto node = [&](std::size_t x, std::size_t y) { return (x % nx) + nx * (y % ny); };
    auto hedge = [&](std::size_t x, std::size_t y) { return (x % nx) + nx * (y % ny); };
    auto vedge = [&](std::size_t x, std::size_t y) { return nn + (x % nx) + nx * (y % ny); };

    ProblemInstance p;
    p.beta = beta;
    p.mesh.topology = Topology::quad_periodic;
    p.mesh.nx = nx;
    p.mesh.ny = ny;
    p.mesh.h = h;
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t x = 0; x < nx; ++x)
            p.mesh.node_coords.push_back({static_cast<double>(x) * h, static_cast<double>(y) * h});
    p.mesh.edge_endpoints.resize(2 * nn);
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t x = 0; x < nx; ++x) {
            p.mesh.edge_endpoints[hedge(x, y)] = {node(x, y), node(x + 1, y)};
            p.mesh.edge_endpoints[vedge(x, y)] = {node(x, y), node(x, y + 1)};
        }
    for (std::size_t k = 0; k < nn; ++k) p.mesh.gradient_nodes.push_back(k);

    // Element edges: bottom, top, left, right. Curl of each basis function is c/h^2.
    const double c[4] = {1.0, -1.0, -1.0, 1.0};
    const double mloc[4][4] = {{1.0 / 3, 1.0 / 6, 0, 0},
                               {1.0 / 6, 1.0 / 3, 0, 0},
                               {0, 0, 1.0 / 3, 1.0 / 6},
                               {0, 0, 1.0 / 6, 1.0 / 3}};
    std::vector<Triplet> ks, ms;
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t x = 0; x < nx; ++x) {
            const std::size_t e[4] = {hedge(x, y), hedge(x, y + 1), vedge(x, y), vedge(x + 1, y)};
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    ks.push_back({e[a], e[b], c[a] * c[b] / (h * h)});
                    if (mloc[a][b] != 0.0) ms.push_back({e[a], e[b], mloc[a][b]});
                }
        }
    p.stiffness = SparseMatrix::from_triplets(2 * nn, 2 * nn, ks);
    p.mass = SparseMatrix::from_triplets(2 * nn, 2 * nn, ms);
    p.A = add(p.stiffness, p.mass, 1.0, beta);
    p.G = discrete_gradient(p.mesh);
    p.dof_kind.assign(2 * nn, DofKind::edge);
    return p;
}

ProblemInstance curlcurl_tri_dirichlet(std::size_t nx, std::size_t ny, double beta) {
    check_size(nx, ny);
    if (beta < 0.0) throw Error("beta must be nonnegative");
    const double h = 1.0 / static_cast<double>(nx);
    auto nid = [&](std::size_t x, std::size_t y) { return x + (nx + 1) * y; };
    const std::size_t nnodes = (nx + 1) * (ny + 1);

    MeshInfo full;
    full.topology = Topology::tri_dirichlet;
    full.nx = nx;
    full.ny = ny;
    full.h = h;
    for (std::size_t y = 0; y <= ny; ++y)
        for (std::size_t x = 0; x <= nx; ++x)
            full.node_coords.push_back({static_cast<double>(x) * h, static_cast<double>(y) * h});
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_id;
    auto add_edge = [&](std::size_t a, std::size_t b) {
        edge_id[{a, b}] = full.edge_endpoints.size();
        full.edge_endpoints.push_back({a, b});
    };
    for (std::size_t y = 0; y <= ny; ++y)
        for (std::size_t x = 0; x < nx; ++x) add_edge(nid(x, y), nid(x + 1, y));
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t x = 0; x <= nx; ++x) add_edge(nid(x, y), nid(x, y + 1));
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t x = 0; x < nx; ++x) add_edge(nid(x, y), nid(x + 1, y + 1));
    const std::size_t ne = full.edge_endpoints.size();

    std::vector<Triplet> ks, ms;
    auto assemble = [&](std::array<std::size_t, 3> t) {
        double px[3], py[3];
        for (int i = 0; i < 3; ++i) {
            px[i] = full.node_coords[t[i]][0];
            py[i] = full.node_coords[t[i]][1];
        }
        const double det = (px[1] - px[0]) * (py[2] - py[0]) - (px[2] - px[0]) * (py[1] - py[0]);
        const double area = 0.5 * std::abs(det);
        // Barycentric gradients.
        double g[3][2];
        for (int i = 0; i < 3; ++i) {
            const int j = (i + 1) % 3, k = (i + 2) % 3;
            g[i][0] = (py[j] - py[k]) / det;
            g[i][1] = (px[k] - px[j]) / det;
        }
        struct Local {
            std::size_t dof;
            int a, b;
        };
        std::vector<Local> loc;
        const int pairs[3][2] = {{0, 1}, {1, 2}, {0, 2}};
        for (const auto& pr : pairs) {
            const std::size_t ga = t[static_cast<std::size_t>(pr[0])];
            const std::size_t gb = t[static_cast<std::size_t>(pr[1])];
            auto it = edge_id.find({ga, gb});
            if (it != edge_id.end())
                loc.push_back({it->second, pr[0], pr[1]});
            else
                loc.push_back({edge_id.at({gb, ga}), pr[1], pr[0]});
        }
        auto lam = [&](int i, int j) { return area * (i == j ? 2.0 : 1.0) / 12.0; };
        auto gd = [&](int i, int j) { return g[i][0] * g[j][0] + g[i][1] * g[j][1]; };
        auto curl = [&](int a, int b) { return 2.0 * (g[a][0] * g[b][1] - g[a][1] * g[b][0]); };
        for (const auto& u : loc)
            for (const auto& v : loc) {
                ks.push_back({u.dof, v.dof, curl(u.a, u.b) * curl(v.a, v.b) * area});
                const double m = lam(u.a, v.a) * gd(u.b, v.b) - lam(u.a, v.b) * gd(u.b, v.a)
                                 - lam(u.b, v.a) * gd(u.a, v.b) + lam(u.b, v.b) * gd(u.a, v.a);
                ms.push_back({u.dof, v.dof, m});
            }
    };
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t x = 0; x < nx; ++x) {
            const std::size_t p00 = nid(x, y), p10 = nid(x + 1, y), p01 = nid(x, y + 1),
                              p11 = nid(x + 1, y + 1);
            assemble({p00, p10, p11});
            assemble({p00, p11, p01});
        }
    const SparseMatrix ks_full = SparseMatrix::from_triplets(ne, ne, ks);
    const SparseMatrix ms_full = SparseMatrix::from_triplets(ne, ne, ms);

    auto on_side = [&](std::size_t a, std::size_t b) {
        const std::size_t ax = a % (nx + 1), ay = a / (nx + 1), bx = b % (nx + 1), by = b / (nx + 1);
        return (ax == bx && (ax == 0 || ax == nx)) || (ay == by && (ay == 0 || ay == ny));
    };
    auto boundary_node = [&](std::size_t i) {
        const std::size_t x = i % (nx + 1), y = i / (nx + 1);
        return x == 0 || x == nx || y == 0 || y == ny;
    };
    std::vector<std::size_t> keep_e, keep_n;
    for (std::size_t e = 0; e < ne; ++e)
        if (!on_side(full.edge_endpoints[e].first, full.edge_endpoints[e].second)) keep_e.push_back(e);
    for (std::size_t i = 0; i < nnodes; ++i)
        if (!boundary_node(i)) keep_n.push_back(i);

    ProblemInstance p;
    p.beta = beta;
    p.mesh = full;
    p.mesh.edge_endpoints.clear();
    for (std::size_t e : keep_e) p.mesh.edge_endpoints.push_back(full.edge_endpoints[e]);
    p.mesh.gradient_nodes = keep_n;
    p.stiffness = select_columns(select_rows(ks_full, keep_e), keep_e);
    p.mass = select_columns(select_rows(ms_full, keep_e), keep_e);
    p.A = add(p.stiffness, p.mass, 1.0, beta);
    p.G = select_columns(discrete_gradient(p.mesh), keep_n);
    p.dof_kind.assign(keep_e.size(), DofKind::edge);
    return p;
}

ProblemInstance stokes_mac_periodic(std::size_t nx, std::size_t ny) {
    check_size(nx, ny);
    const double h = 1.0 / static_cast<double>(nx);
    const std::size_t nc = nx * ny;
    auto cell = [&](std::size_t i, std::size_t j) { return (i % nx) + nx * (j % ny); };
    auto uf = [&](std::size_t i, std::size_t j) { return cell(i, j); };
    auto vf = [&](std::size_t i, std::size_t j) { return nc + cell(i, j); };
    const std::size_t nv = 2 * nc;

    ProblemInstance p;
    p.mesh.topology = Topology::mac_periodic;
    p.mesh.nx = nx;
    p.mesh.ny = ny;
    p.mesh.h = h;
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            p.mesh.node_coords.push_back({(static_cast<double>(i) + 0.5) * h,
                                          (static_cast<double>(j) + 0.5) * h});
    p.mesh.edge_endpoints.resize(nv);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
            p.mesh.edge_endpoints[uf(i, j)] = {cell(i + nx - 1, j), cell(i, j)};
            p.mesh.edge_endpoints[vf(i, j)] = {cell(i, j + ny - 1), cell(i, j)};
        }
    for (std::size_t k = 0; k < nc; ++k) p.mesh.gradient_nodes.push_back(k);
    p.G = discrete_gradient(p.mesh);

    std::vector<Triplet> t;
    const double ih2 = 1.0 / (h * h);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            for (int comp = 0; comp < 2; ++comp) {
                auto f = [&](std::size_t a, std::size_t b) { return comp == 0 ? uf(a, b) : vf(a, b); };
                const std::size_t r = f(i, j);
                t.push_back({r, r, 4.0 * ih2});
                t.push_back({r, f(i + 1, j), -ih2});
                t.push_back({r, f(i + nx - 1, j), -ih2});
                t.push_back({r, f(i, j + 1), -ih2});
                t.push_back({r, f(i, j + ny - 1), -ih2});
            }
    p.stiffness = SparseMatrix::from_triplets(nv, nv, t);
    const SparseMatrix b = scaled(p.G, 1.0 / h);
    p.A = block2x2(p.stiffness, b, b.transpose(), SparseMatrix(nc, nc));
    p.mass = SparseMatrix(nv, nv);
    p.dof_kind.assign(nv + nc, DofKind::pressure);
    for (std::size_t k = 0; k < nc; ++k) {
        p.dof_kind[k] = DofKind::velocity_x;
        p.dof_kind[nc + k] = DofKind::velocity_y;
    }
    for (std::size_t c = 0; c < 3; ++c) {
        Vector z(nv + nc, 0.0);
        for (std::size_t k = 0; k < nc; ++k) z[c * nc + k] = 1.0;
        p.nullspace.push_back(std::move(z));
    }
    return p;
}

void write_problem(const std::string& prefix, const ProblemInstance& p) {
    write_matrix_market(prefix + ".mtx", p.A, true);
    std::ofstream out(prefix + ".meta");
    if (!out) throw Error("cannot write " + prefix + ".meta");
    out << "topology " << to_string(p.mesh.topology) << "\n";
    out << "nx " << p.mesh.nx << "\nny " << p.mesh.ny << "\n";
    out << "beta " << p.beta << "\n";
    out << "dofs " << p.size() << "\n";
    for (auto k : p.dof_kind) out << to_string(k) << "\n";
}

} // namespace nkamg
