#include "nkamg/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>

#include "nkamg/rng.hpp"

namespace nkamg {

std::size_t default_m(Topology t) { return t == Topology::tri_dirichlet ? 3 : 2; }

CurlCurlPipeline build_curlcurl_pipeline(ProblemInstance problem, const PipelineOptions& opts) {
    CurlCurlPipeline pl;
    pl.problem = std::move(problem);
    const SparseMatrix& a = pl.problem.A;
    const std::size_t m = opts.m ? opts.m : default_m(pl.problem.mesh.topology);
    const double eps = opts.eps > 0.0 ? opts.eps : default_eps(pl.problem);
    pl.nk = dedupe_and_orient(find_local_near_kernels(a, m, eps));
    if (pl.nk.size() == 0) throw Error("no local near-kernel found (m=" + std::to_string(m) + ")");
    pl.A_N = sptriple(pl.nk.N.transpose(), a, pl.nk.N);
    pl.split = cf_split(pl.A_N, opts.theta);
    pl.basis = form_split_basis(a, pl.nk.N, pl.A_N, pl.split);
    pl.P = ideal_interpolation(a, pl.basis);
    pl.smoother = composite({distributive(a, pl.nk.N), l1jacobi(a, opts.omega)});
    return pl;
}

TwoGridHierarchy curlcurl_hierarchy(const CurlCurlPipeline& pl, const SparseMatrix& p, bool symmetrized) {
    const SmootherPtr s = symmetrized ? symmetrize(pl.smoother) : pl.smoother;
    return build_hierarchy(pl.problem.A, p, s, s, pl.problem.nullspace);
}

const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> m = {"ours", "classical_ideal", "geometric", "cr_only", "pcg",
                                               "cg", "stokes_block", "stokes_global", "stokes_sparse"};
    return m;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
    throw Error("line " + std::to_string(line) + ": " + msg);
}

double parse_real(const std::string& v, std::size_t line, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        fail(line, "malformed number for " + key + ": '" + v + "'");
    }
}

std::uint64_t parse_count(const std::string& v, std::size_t line, const std::string& key) {
    if (v.empty() || !std::all_of(v.begin(), v.end(), [](unsigned char c) { return std::isdigit(c); }))
        fail(line, "malformed integer for " + key + ": '" + v + "'");
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        fail(line, "integer out of range for " + key + ": '" + v + "'");
    }
}

bool parse_bool(const std::string& v, std::size_t line, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(line, "malformed boolean for " + key + ": '" + v + "'");
}

std::string fmt(double x, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '"') c = ' ';
    return s;
}

bool is_curlcurl(Family f) { return f != Family::stokes_mac; }

} // namespace

ExperimentConfig validate_config(const std::string& text) {
    ExperimentConfig cfg;
    cfg.source_text = text;
    bool have_family = false;
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    std::map<std::string, std::size_t> seen;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) fail(line, "expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string val = trim(body.substr(eq + 1));
        if (key.empty()) fail(line, "missing key");
        if (val.empty()) fail(line, "missing value for " + key);
        if (seen.count(key)) fail(line, "duplicate key " + key);
        seen[key] = line;
        if (key == "family") {
            if (val == "curlcurl_quad_periodic")
                cfg.family = Family::curlcurl_quad_periodic;
            else if (val == "curlcurl_tri_dirichlet")
                cfg.family = Family::curlcurl_tri_dirichlet;
            else if (val == "stokes_mac")
                cfg.family = Family::stokes_mac;
            else
                fail(line, "unknown family '" + val + "'");
            have_family = true;
        } else if (key == "sizes") {
            for (const auto& item : split_list(val)) {
                const auto x = item.find('x');
                const std::string a = x == std::string::npos ? item : item.substr(0, x);
                const std::string b = x == std::string::npos ? item : item.substr(x + 1);
                const auto nx = parse_count(trim(a), line, key), ny = parse_count(trim(b), line, key);
                if (nx < 2 || ny < 2) fail(line, "sizes must be at least 2x2");
                cfg.sizes.emplace_back(nx, ny);
            }
            if (cfg.sizes.empty()) fail(line, "sizes list is empty");
        } else if (key == "beta") {
            cfg.beta = parse_real(val, line, key);
            if (cfg.beta < 0.0) fail(line, "beta must be nonnegative");
        } else if (key == "methods") {
            cfg.methods = split_list(val);
            for (const auto& m : cfg.methods)
                if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end())
                    fail(line, "unknown method '" + m + "'");
            if (cfg.methods.empty()) fail(line, "methods list is empty");
        } else if (key == "tol") {
            cfg.tol = parse_real(val, line, key);
            if (!(cfg.tol > 0.0)) fail(line, "tol must be positive");
        } else if (key == "seed") {
            cfg.seed = parse_count(val, line, key);
        } else if (key == "omega") {
            cfg.omega = parse_real(val, line, key);
            if (cfg.omega < 0.0) fail(line, "omega must be nonnegative");
        } else if (key == "symmetrize") {
            cfg.symmetrize = parse_bool(val, line, key);
        } else if (key == "theta") {
            cfg.theta = parse_real(val, line, key);
            if (cfg.theta < 0.0 || cfg.theta > 1.0) fail(line, "theta must lie in [0, 1]");
        } else if (key == "m") {
            cfg.m = parse_count(val, line, key);
            if (cfg.m < 1) fail(line, "m must be at least 1");
        } else if (key == "eps") {
            cfg.eps = parse_real(val, line, key);
            if (!(cfg.eps > 0.0)) fail(line, "eps must be positive");
        } else if (key == "cr_iters") {
            cfg.cr_iters = parse_count(val, line, key);
            if (cfg.cr_iters < 5) fail(line, "cr_iters must be at least 5");
        } else if (key == "max_iter") {
            cfg.max_iter = parse_count(val, line, key);
            if (cfg.max_iter < 1) fail(line, "max_iter must be positive");
        } else if (key == "richardson_omega") {
            cfg.richardson_omega = parse_real(val, line, key);
        } else if (key == "stokes_split" || key == "stokes_sparse_split") {
            StrengthMode& mode = key == "stokes_split" ? cfg.stokes_split : cfg.stokes_sparse_split;
            if (val == "negative")
                mode = StrengthMode::negative;
            else if (val == "absolute")
                mode = StrengthMode::absolute;
            else
                fail(line, key + " must be negative or absolute");
        } else {
            fail(line, "unknown key '" + key + "'");
        }
    }
    if (!have_family) fail(line, "missing family");
    if (cfg.methods.empty()) cfg.methods = {"ours"};
    if (cfg.sizes.empty()) cfg.sizes = {{8, 8}, {16, 16}};
    return cfg;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_csv(std::ostream& out, const CsvTable& t) {
    for (std::size_t k = 0; k < t.header.size(); ++k) out << (k ? "," : "") << t.header[k];
    out << "\n";
    for (const auto& r : t.rows) {
        for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << r[k];
        out << "\n";
    }
}

namespace {

const char* stokes_variant_columns[4] = {"no_P_smooth", "P_smooth", "diagonal_no_P_smooth", "diagonal_P_smooth"};

std::vector<std::string> method_columns(const std::string& m, Family f) {
    if (m == "ours") return {"P"};
    if (m == "classical_ideal") return {"P_I0"};
    if (m == "geometric") return {"geometric"};
    if (m == "cr_only") return {"CR"};
    if (m == "pcg") return {"step_pcg_P"};
    if (m == "cg") return {"step_cg"};
    if (m == "stokes_block") return {"ideal_P"};
    if (m == "stokes_global") return {"geometric_P"};
    if (m == "stokes_sparse") {
        std::vector<std::string> c(stokes_variant_columns, stokes_variant_columns + 4);
        for (const char* v : stokes_variant_columns) c.push_back(std::string("complexity_") + v);
        return c;
    }
    (void)f;
    return {};
}

std::string rate_cell(const SolveReport& r) {
    return fmt(r.asymptotic_rate) + (r.diverged ? "*" : "");
}

double cell_value(const std::string& s) {
    if (s.empty()) return std::nan("");
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        return std::nan("");
    }
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    ExperimentResult res;
    auto& t = res.table;
    t.header = {"size", "Dof"};
    if (is_curlcurl(cfg.family)) t.header.push_back("optimal");
    for (const auto& m : cfg.methods)
        for (const auto& c : method_columns(m, cfg.family)) t.header.push_back(c);
    t.header.insert(t.header.end(), {"status", "seed", "config_hash"});
    const std::string hash = fnv1a_hex(cfg.source_text);
    auto col = [&](const std::string& name) {
        return static_cast<std::size_t>(std::find(t.header.begin(), t.header.end(), name) - t.header.begin());
    };
    auto has = [&](const std::string& m) { return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end(); };

    // Row computations are independent; the table keeps config order.
    std::vector<std::vector<std::string>> rows(cfg.sizes.size(), std::vector<std::string>(t.header.size()));
    for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
        const auto [nx, ny] = cfg.sizes[si];
        auto& row = rows[si];
        row[col("size")] = nx == ny ? std::to_string(nx) : std::to_string(nx) + "x" + std::to_string(ny);
        row[col("seed")] = std::to_string(cfg.seed);
        row[col("config_hash")] = hash;
        std::vector<std::string> status;
        auto attempt = [&](const std::string& what, auto&& fn) {
            try {
                fn();
            } catch (const std::exception& e) {
                status.push_back(what + ": " + sanitize(e.what()));
            }
        };
        if (is_curlcurl(cfg.family)) {
            ProblemInstance prob = cfg.family == Family::curlcurl_quad_periodic
                                       ? curlcurl_quad_periodic(nx, ny, cfg.beta)
                                       : curlcurl_tri_dirichlet(nx, ny, cfg.beta);
            row[col("Dof")] = std::to_string(prob.size());
            const Vector b = random_vector(prob.size(), cfg.seed);
            std::optional<CurlCurlPipeline> pl;
            attempt("setup", [&] {
                PipelineOptions po;
                po.m = cfg.m;
                po.eps = cfg.eps;
                po.theta = cfg.theta;
                po.omega = cfg.omega;
                pl = build_curlcurl_pipeline(prob, po);
            });
            for (const auto& m : cfg.methods) {
                if (!pl && m != "cg") {
                    status.push_back(m + ": skipped");
                    continue;
                }
                attempt(m, [&] {
                    if (m == "ours") {
                        const auto h = curlcurl_hierarchy(*pl, pl->P.P, cfg.symmetrize);
                        row[col("P")] = rate_cell(measure_rate(h, b, cfg.tol, cfg.max_iter));
                    } else if (m == "classical_ideal") {
                        const auto pc = classical_ideal(prob.A, cfg.theta);
                        const auto h = curlcurl_hierarchy(*pl, pc.P, cfg.symmetrize);
                        row[col("P_I0")] = rate_cell(measure_rate(h, b, cfg.tol, cfg.max_iter));
                    } else if (m == "geometric") {
                        const auto h = curlcurl_hierarchy(*pl, nedelec_prolongation(prob.mesh), cfg.symmetrize);
                        row[col("geometric")] = rate_cell(measure_rate(h, b, cfg.tol, cfg.max_iter));
                    } else if (m == "cr_only") {
                        const auto rep = cr_rate(prob.A, pl->basis, *pl->smoother, CRVariant::habituated,
                                                 cfg.cr_iters, cfg.seed);
                        row[col("CR")] = fmt(rep.rho_estimate);
                    } else if (m == "pcg") {
                        const auto h = curlcurl_hierarchy(*pl, pl->P.P, true);
                        const auto rep = pcg(h, b, cfg.tol, cfg.max_iter);
                        row[col("step_pcg_P")] = std::to_string(rep.iterations) + (rep.converged ? "" : "*");
                    } else if (m == "cg") {
                        const auto rep = cg(prob.A, b, cfg.tol, 20000);
                        row[col("step_cg")] = std::to_string(rep.iterations) + (rep.converged ? "" : "*");
                    } else {
                        throw Error("method not available for this family");
                    }
                });
            }
        } else {
            const ProblemInstance prob = stokes_mac_periodic(nx, ny);
            row[col("Dof")] = std::to_string(prob.size());
            const Vector b = project_out(random_vector(prob.size(), cfg.seed), prob.nullspace);
            StokesOptions so;
            so.theta = cfg.theta;
            so.split_mode = cfg.stokes_split;
            std::optional<StokesSetup> setup;
            if (has("stokes_block") || has("stokes_global") || has("cr_only"))
                attempt("setup", [&] { setup = stokes_block_interpolation(prob, so); });
            for (const auto& m : cfg.methods) {
                attempt(m, [&] {
                    if (m == "stokes_block") {
                        if (!setup) throw Error("skipped");
                        const auto h = stokes_hierarchy(prob, setup->block_P);
                        row[col("ideal_P")] = rate_cell(measure_rate(h, b, cfg.tol, cfg.max_iter));
                    } else if (m == "stokes_global") {
                        if (!setup) throw Error("skipped");
                        const auto h = stokes_hierarchy(prob, stokes_global_ideal(*setup));
                        row[col("geometric_P")] = rate_cell(measure_rate(h, b, cfg.tol, cfg.max_iter));
                    } else if (m == "cr_only") {
                        if (!setup) throw Error("skipped");
                        SplitBasis g;
                        const auto& pe = setup->P_e.basis;
                        const auto& pn = setup->P_N.basis;
                        g.R = block2x2(pe.R, SparseMatrix(pe.R.nrows(), pn.R.ncols()),
                                       SparseMatrix(pn.R.nrows(), pe.R.ncols()), pn.R);
                        g.S = block2x2(pe.S, SparseMatrix(pe.S.nrows(), pn.S.ncols()),
                                       SparseMatrix(pn.S.nrows(), pe.S.ncols()), pn.S);
                        const auto vanka = schwarz_multiplicative(prob.A, vanka_patches(prob));
                        row[col("CR")] = fmt(cr_rate(prob.A, g, *vanka, CRVariant::habituated, cfg.cr_iters,
                                                     cfg.seed)
                                                 .rho_estimate);
                    } else if (m == "stokes_sparse") {
                        for (int v = 0; v < 4; ++v) {
                            const bool diag = v >= 2;
                            const int steps = v % 2;
                            attempt(stokes_variant_columns[v], [&] {
                                StokesOptions sso = so;
                                sso.split_mode = cfg.stokes_sparse_split;
                                const auto s = stokes_sparse_variants(prob, diag, steps, cfg.richardson_omega, sso);
                                const auto h = stokes_hierarchy(prob, s.block_P);
                                row[col(stokes_variant_columns[v])] =
                                    rate_cell(measure_rate(h, b, cfg.tol, cfg.max_iter));
                                row[col(std::string("complexity_") + stokes_variant_columns[v])] =
                                    fmt(operator_complexity(prob.A, h.A_c), 3);
                            });
                        }
                    } else {
                        throw Error("method not available for this family");
                    }
                });
            }
        }
        row[col("status")] = status.empty() ? "ok" : [&] {
            std::string s;
            for (std::size_t k = 0; k < status.size(); ++k) s += (k ? "; " : "") + status[k];
            return s;
        }();
    }
    t.rows = std::move(rows);

    // Summary and acceptance checks.
    for (std::size_t c = 2; c + 3 < t.header.size(); ++c) {
        const std::string& name = t.header[c];
        if (name == "optimal") continue;
        std::string line = name + ":";
        for (const auto& r : t.rows) line += " " + (r[c].empty() ? std::string("-") : r[c]);
        res.summary.push_back(line);
        for (std::size_t ri = 0; ri < t.rows.size(); ++ri) {
            const std::string& cell = t.rows[ri][c];
            const double v = cell_value(cell);
            const std::string where = name + " at size " + t.rows[ri][0];
            const bool starred = !cell.empty() && cell.back() == '*';
            if (name == "P_I0") continue; // expected to degrade
            if (starred) res.check_failures.push_back(where + " did not converge");
            if (name == "P" && cfg.family == Family::curlcurl_quad_periodic && !(v < 0.7))
                res.check_failures.push_back(where + " rate " + cell + " >= 0.7");
            if (name == "P" && cfg.family == Family::curlcurl_tri_dirichlet && !(v <= 0.99))
                res.check_failures.push_back(where + " rate " + cell + " > 0.99");
            if ((name == "ideal_P" || name == "geometric_P") && !(v < 1.0))
                res.check_failures.push_back(where + " rate " + cell + " >= 1");
            for (const char* sv : stokes_variant_columns)
                if (name == sv && !(v < 1.0)) res.check_failures.push_back(where + " rate " + cell + " >= 1");
        }
    }
    if (t.header.end() != std::find(t.header.begin(), t.header.end(), "step_pcg_P") &&
        t.header.end() != std::find(t.header.begin(), t.header.end(), "step_cg"))
        for (const auto& r : t.rows) {
            const double p = cell_value(r[col("step_pcg_P")]), c = cell_value(r[col("step_cg")]);
            if (!(p < c)) res.check_failures.push_back("PCG not faster than CG at size " + r[0]);
        }
    for (const auto& r : t.rows)
        if (r[col("status")] != "ok") res.check_failures.push_back("size " + r[0] + ": " + r[col("status")]);
    return res;
}

} // namespace nkamg
