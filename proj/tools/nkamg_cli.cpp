#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nkamg/experiment.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"Two-grid AMG benchmarks for near-singular systems"};
    app.require_subcommand(1);
    auto* run = app.add_subcommand("run", "Run an experiment config");
    std::string config_path;
    std::string out_dir = ".";
    bool check = false;
    std::optional<std::uint64_t> seed;
    run->add_option("config", config_path, "Config file (key = value lines)")->required()->check(CLI::ExistingFile);
    auto* out_opt = run->add_option("--out", out_dir, "Output directory (env NKAMG_OUT_DIR overrides the default)");
    run->add_flag("--check", check, "Exit nonzero if any row misses its acceptance threshold");
    run->add_option("--seed", seed, "Override the config seed");
    CLI11_PARSE(app, argc, argv);

    if (out_opt->count() == 0)
        if (const char* env = std::getenv("NKAMG_OUT_DIR")) out_dir = env;

    std::ifstream in(config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    nkamg::ExperimentConfig cfg;
    try {
        cfg = nkamg::validate_config(buf.str());
    } catch (const std::exception& e) {
        std::cerr << config_path << ": " << e.what() << "\n";
        return 2;
    }
    if (seed) {
        cfg.seed = *seed;
        cfg.source_text += "\n# seed override " + std::to_string(*seed) + "\n";
    }

    const nkamg::ExperimentResult res = nkamg::run_experiment(cfg);
    fs::create_directories(out_dir);
    const fs::path csv = fs::path(out_dir) / (fs::path(config_path).stem().string() + ".csv");
    {
        std::ofstream out(csv);
        nkamg::write_csv(out, res.table);
    }
    std::cout << "wrote " << csv.string() << "\n";
    for (const auto& line : res.summary) std::cout << "  " << line << "\n";
    if (!res.check_failures.empty()) {
        std::cout << "flags:\n";
        for (const auto& f : res.check_failures) std::cout << "  " << f << "\n";
    }
    return check && !res.check_failures.empty() ? 1 : 0;
}
