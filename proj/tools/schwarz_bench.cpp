// SPDX-License-Identifier: Apache-2.0
//
// Experiment driver: runs the model problem with one- and two-level Schwarz
// preconditioners and emits the comparison table plus optional artifacts.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "schwarz/bench.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Two-level Schwarz solver benchmark"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run the experiments of a config file");
    std::string config_path;
    std::string mode_override;
    std::string out_override;
    int threads_override = 0;
    bool dump_matrices = false;
    bool verify_theory = false;
    run->add_option("--config", config_path, "config file (key = value lines)")->required();
    run->add_option("--mode", mode_override, "override coarse mode: none|geneo|rgeneo|both");
    run->add_option("--out", out_override, "output directory");
    run->add_option("--threads", threads_override, "worker pool size");
    run->add_flag("--dump-matrices", dump_matrices, "dump matrices, pencils and eigenvalues");
    run->add_flag("--verify-theory", verify_theory,
                  "run the projection/decomposition checks and assert the bounds");

    CLI11_PARSE(app, argc, argv);

    try {
        auto configs = schwarz::parse_config_file(config_path);
        bool ok = true;
        std::vector<schwarz::BenchRow> all_rows;
        std::string out_dir;
        for (size_t i = 0; i < configs.size(); ++i) {
            schwarz::ExperimentConfig cfg = configs[i];
            if (!mode_override.empty()) cfg.mode = mode_override;
            if (!out_override.empty()) cfg.out_dir = out_override;
            if (threads_override > 0) cfg.threads = threads_override;
            cfg.dump_matrices = dump_matrices;
            cfg.verify_theory = verify_theory;
            cfg.validate();
            if (cfg.out_dir.empty()) {
                const char* env = std::getenv("SCHWARZ_BENCH_OUT");
                cfg.out_dir = env && *env ? env : "out";
            }
            out_dir = cfg.out_dir;

            auto result = schwarz::run_experiment(cfg);
            for (const auto& row : result.rows()) all_rows.push_back(row);

            schwarz::ArtifactFlags flags;
            flags.matrix = cfg.dump_matrices;
            flags.eigenvalues = cfg.dump_matrices;
            flags.layout = cfg.dump_matrices;
            flags.coefficient = cfg.dump_matrices;
            flags.solution = cfg.dump_matrices;
            schwarz::export_artifacts(result, cfg.out_dir, flags, static_cast<int>(i));

            ok = ok && result.all_converged;
            if (verify_theory) {
                ok = ok && result.all_bounds_ok;
                for (const auto& r : result.runs)
                    if (r.has_theory && r.theory.decomposition_samples > 0)
                        ok = ok && r.theory.decomposition_within_c0;
            }
        }
        std::string csv = schwarz::emit_report_csv(all_rows);
        std::string md = schwarz::emit_report_markdown(all_rows);
        std::ofstream(out_dir + "/report.csv") << csv;
        std::ofstream(out_dir + "/report.md") << md;
        std::cout << md << std::flush;
        return ok ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
