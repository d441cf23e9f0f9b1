// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "schwarz/coarse.hpp"
#include "schwarz/krylov.hpp"
#include "schwarz/theory.hpp"

namespace schwarz {

/// One experiment: the model problem on a given mesh, decomposition and
/// coefficient, solved with the requested coarse-space mode(s).
struct ExperimentConfig {
    int nx = 128, ny = 128;
    int px = 4, py = 4;
    int overlap_layers = 2;
    int star_layers = 1;
    std::string coeff = "channels";  // constant | channels | inclusions | islands
    double contrast = 1e6;
    unsigned long coeff_seed = 7;
    std::string mode = "both";  // none | geneo | rgeneo | both
    std::string rule = "fixed";  // fixed | threshold
    int m = 12;
    double tau = 0.3;
    double tol = 1e-10;
    int maxit = 500;
    std::string stop_norm = "residual";  // residual | preconditioned
    std::string eta_ramp = "linear";
    int threads = 1;
    int eig_dense_cap = 4000;
    unsigned long seed = 1;
    std::string out_dir;
    bool dump_matrices = false;
    bool verify_theory = false;

    void validate() const;
    std::vector<std::string> mode_list() const;
    ModeRule mode_rule() const;
};

/// Parses the flat key=value config format; comma-separated values expand to
/// a cartesian product of experiments.
std::vector<ExperimentConfig> parse_config_text(const std::string& text);
std::vector<ExperimentConfig> parse_config_file(const std::string& path);

/// One line of the comparison table.
struct BenchRow {
    std::string mode;
    int subdomains = 0;
    int iterations = 0;
    double kappa = 0.0;
    double t_setup = 0.0;
    double t_solve = 0.0;
    int coarse_dim = 0;
    double bound = 0.0;  // 0 for one-level runs (no bound asserted)
    bool bound_ok = true;
};

/// Full per-mode result retained for artifact export.
struct ExperimentRun {
    std::string mode;
    BenchRow row;
    SolveReport report;
    TheoryReport theory;
    bool has_theory = false;
    Vector solution;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<ExperimentRun> runs;
    bool all_converged = true;
    bool all_bounds_ok = true;

    std::vector<BenchRow> rows() const;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

std::string emit_report_csv(const std::vector<BenchRow>& rows);
std::string emit_report_markdown(const std::vector<BenchRow>& rows);
std::vector<BenchRow> parse_report_csv(const std::string& text);

struct ArtifactFlags {
    bool matrix = false;       // global matrix + local pencils (Matrix Market)
    bool coefficient = false;  // CSV + PGM
    bool solution = false;     // CSV rows dof,x,y,value
    bool layout = false;       // JSON
    bool eigenvalues = false;  // CSV
    bool residuals = true;     // CSV per run
    bool theory = true;        // JSON + markdown per run (when available)
};

void export_artifacts(const ExperimentResult& result, const std::string& out_dir,
                      const ArtifactFlags& flags, int run_index = 0);

void write_solution_csv(const StructuredMesh& mesh, const Vector& u, const std::string& path);

}  // namespace schwarz
