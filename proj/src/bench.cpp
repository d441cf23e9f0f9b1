// SPDX-License-Identifier: Apache-2.0
#include "schwarz/bench.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "schwarz/preconditioner.hpp"

namespace schwarz {

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "nx",   "ny",       "px",     "py",   "overlap_layers", "star_layers", "coeff",
        "contrast", "coeff_seed", "mode", "rule", "m",   "tau",  "tol",
        "maxit",    "stop_norm", "eta_ramp", "threads", "eig_dense_cap", "seed", "out_dir"};
    return keys;
}

void assign_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
    try {
        if (key == "nx") c.nx = std::stoi(value);
        else if (key == "ny") c.ny = std::stoi(value);
        else if (key == "px") c.px = std::stoi(value);
        else if (key == "py") c.py = std::stoi(value);
        else if (key == "overlap_layers") c.overlap_layers = std::stoi(value);
        else if (key == "star_layers") c.star_layers = std::stoi(value);
        else if (key == "coeff") c.coeff = value;
        else if (key == "contrast") c.contrast = std::stod(value);
        else if (key == "coeff_seed") c.coeff_seed = std::stoul(value);
        else if (key == "mode") c.mode = value;
        else if (key == "rule") c.rule = value;
        else if (key == "m") c.m = std::stoi(value);
        else if (key == "tau") c.tau = std::stod(value);
        else if (key == "tol") c.tol = std::stod(value);
        else if (key == "maxit") c.maxit = std::stoi(value);
        else if (key == "stop_norm") c.stop_norm = value;
        else if (key == "eta_ramp") c.eta_ramp = value;
        else if (key == "threads") c.threads = std::stoi(value);
        else if (key == "eig_dense_cap") c.eig_dense_cap = std::stoi(value);
        else if (key == "seed") c.seed = std::stoul(value);
        else if (key == "out_dir") c.out_dir = value;
        else throw std::invalid_argument("unknown config key: " + key);
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad value for config key " + key + ": " + value);
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    if (nx < 1 || ny < 1 || px < 1 || py < 1 || overlap_layers < 1 || star_layers < 1 || m < 0 ||
        maxit < 1 || threads < 1 || eig_dense_cap < 1)
        throw std::invalid_argument("config: all counts must be positive");
    if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("config: tol must be in (0,1)");
    if (nx % px != 0 || ny % py != 0)
        throw std::invalid_argument("config: mesh not divisible by the subdomain grid");
    if (contrast < 1.0) throw std::invalid_argument("config: contrast must be >= 1");
    parse_coefficient_kind(coeff);
    if (mode != "none" && mode != "geneo" && mode != "rgeneo" && mode != "both")
        throw std::invalid_argument("config: unknown mode " + mode);
    if (rule != "fixed" && rule != "threshold")
        throw std::invalid_argument("config: unknown rule " + rule);
    if (rule == "threshold" && !(tau > 0.0))
        throw std::invalid_argument("config: tau must be positive");
    if (stop_norm != "residual" && stop_norm != "preconditioned")
        throw std::invalid_argument("config: unknown stop_norm " + stop_norm);
    if (eta_ramp != "linear")
        throw std::invalid_argument("config: unsupported eta_ramp " + eta_ramp);
}

std::vector<std::string> ExperimentConfig::mode_list() const {
    if (mode == "both") return {"geneo", "rgeneo"};
    return {mode};
}

ModeRule ExperimentConfig::mode_rule() const {
    return rule == "fixed" ? ModeRule::fixed(m) : ModeRule::threshold(tau);
}

std::vector<ExperimentConfig> parse_config_text(const std::string& text) {
    std::map<std::string, std::vector<std::string>> values;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string rhs = trim(line.substr(eq + 1));
        if (std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end())
            throw std::invalid_argument("unknown config key: " + key);
        std::vector<std::string> list;
        std::istringstream vs(rhs);
        std::string item;
        while (std::getline(vs, item, ',')) {
            item = trim(item);
            if (!item.empty()) list.push_back(item);
        }
        if (list.empty())
            throw std::invalid_argument("config key " + key + " has no value");
        values[key] = std::move(list);
    }

    // Cartesian product over list-valued keys, in canonical key order.
    std::vector<ExperimentConfig> out{ExperimentConfig{}};
    std::vector<std::pair<std::string, std::vector<std::string>>> ordered;
    for (const auto& key : config_keys())
        if (auto it = values.find(key); it != values.end()) ordered.emplace_back(key, it->second);
    for (const auto& [key, list] : ordered) {
        std::vector<ExperimentConfig> next;
        next.reserve(out.size() * list.size());
        for (const auto& base : out)
            for (const auto& v : list) {
                ExperimentConfig c = base;
                assign_key(c, key, v);
                next.push_back(std::move(c));
            }
        out = std::move(next);
    }
    for (const auto& c : out) c.validate();
    return out;
}

std::vector<ExperimentConfig> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::vector<BenchRow> ExperimentResult::rows() const {
    std::vector<BenchRow> out;
    out.reserve(runs.size());
    for (const auto& r : runs) out.push_back(r.row);
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    ExperimentResult result;
    result.config = config;

    StructuredMesh mesh(config.nx, config.ny);
    CoefficientField coeff =
        gen_coefficient(config.coeff, config.contrast, config.coeff_seed, mesh);
    GlobalSystem system = build_model_problem(mesh, coeff);
    SubdomainLayout layout = build_partition(mesh, config.px, config.py, config.overlap_layers,
                                             config.star_layers, system.dirichlet);

    // Lifted initial guess: Dirichlet values in place, zero elsewhere; PCG
    // solves for the correction from a zero start.
    Vector lift = Vector::Zero(mesh.num_dofs());
    for (size_t k = 0; k < system.dirichlet.size(); ++k)
        lift[system.dirichlet[k]] = system.dirichlet_values[static_cast<int>(k)];
    Vector f_hom = system.f - system.A.apply(lift);

    for (const std::string& mode_name : config.mode_list()) {
        ExperimentRun run;
        run.mode = mode_name;

        std::shared_ptr<const CoarseSpace> coarse;
        double t_eigen = 0.0, t_coarse = 0.0;
        if (mode_name != "none") {
            CoarseOptions copts;
            copts.rule = config.mode_rule();
            copts.eig.dense_cap = config.eig_dense_cap;
            copts.eig.seed = config.seed;
            copts.threads = config.threads;
            copts.keep_analysis_data = config.verify_theory;
            // The theory checks inherit the eigenpair residuals; tighten them
            // so the measured defects reflect the estimates, not the solver.
            if (config.verify_theory) copts.eig.residual_tol = 1e-12;
            CoarseMode cmode =
                mode_name == "geneo" ? CoarseMode::geneo : CoarseMode::rgeneo;
            auto cs = std::make_shared<CoarseSpace>(
                assemble_coarse(system, layout, cmode, copts));
            t_eigen = cs->t_eigen;
            t_coarse = cs->t_assembly;
            coarse = std::move(cs);
        }

        SchwarzOptions sopts;
        sopts.threads = config.threads;
        SchwarzPreconditioner M = SchwarzPreconditioner::setup(system, layout, coarse, sopts);
        double t_setup = t_eigen + t_coarse + M.setup_seconds();

        PcgOptions popts;
        popts.tol = config.tol;
        popts.maxit = config.maxit;
        popts.precond_norm_stopping = config.stop_norm == "preconditioned";
        double t0 = now_seconds();
        auto [w, report] = pcg(system.A, [&M](const Vector& r) { return M.apply(r); }, f_hom, popts);
        double t_solve = now_seconds() - t0;

        run.solution = lift + w;
        run.report = report;
        run.report.t_setup = t_setup;
        run.report.t_solve = t_solve;
        run.report.t_factor = M.setup_seconds();
        run.report.t_eigen = t_eigen;
        run.report.t_coarse = t_coarse;

        BenchRow row;
        row.mode = mode_name;
        row.subdomains = layout.num_subdomains();
        row.iterations = report.iterations;
        row.kappa = report.kappa;
        row.t_setup = t_setup;
        row.t_solve = t_solve;
        if (coarse) {
            row.coarse_dim = coarse->dim();
            if (config.verify_theory) {
                run.theory = verify_theory(system, layout, *coarse, run.report, 20, 10,
                                           config.seed + 17, &M);
            } else {
                run.theory = condition_bounds(layout, *coarse, run.report);
            }
            run.has_theory = true;
            row.bound = run.theory.bound;
            row.bound_ok = run.theory.bound_satisfied;
        }
        result.all_converged = result.all_converged && report.converged;
        result.all_bounds_ok = result.all_bounds_ok && row.bound_ok;
        run.row = row;
        result.runs.push_back(std::move(run));
    }
    return result;
}

std::string emit_report_csv(const std::vector<BenchRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("emit_report: no rows");
    std::ostringstream os;
    os.precision(17);
    os << "mode,N,its,kappa,t_setup,t_solve,coarse_dim,bound,bound_ok\n";
    for (const auto& r : rows)
        os << r.mode << "," << r.subdomains << "," << r.iterations << "," << r.kappa << ","
           << r.t_setup << "," << r.t_solve << "," << r.coarse_dim << "," << r.bound << ","
           << (r.bound_ok ? 1 : 0) << "\n";
    return os.str();
}

std::vector<BenchRow> parse_report_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    std::vector<BenchRow> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::istringstream ls(line);
        BenchRow r;
        std::string field;
        std::getline(ls, r.mode, ',');
        std::getline(ls, field, ','); r.subdomains = std::stoi(field);
        std::getline(ls, field, ','); r.iterations = std::stoi(field);
        std::getline(ls, field, ','); r.kappa = std::stod(field);
        std::getline(ls, field, ','); r.t_setup = std::stod(field);
        std::getline(ls, field, ','); r.t_solve = std::stod(field);
        std::getline(ls, field, ','); r.coarse_dim = std::stoi(field);
        std::getline(ls, field, ','); r.bound = std::stod(field);
        std::getline(ls, field, ','); r.bound_ok = std::stoi(field) != 0;
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string emit_report_markdown(const std::vector<BenchRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("emit_report: no rows");

    // Side-by-side mode grouping when each (N, mode) appears once.
    std::set<std::string> modes;
    std::vector<int> n_order;
    std::map<std::pair<int, std::string>, const BenchRow*> cell;
    bool grouped = true;
    for (const auto& r : rows) {
        modes.insert(r.mode);
        if (std::find(n_order.begin(), n_order.end(), r.subdomains) == n_order.end())
            n_order.push_back(r.subdomains);
        if (!cell.emplace(std::make_pair(r.subdomains, r.mode), &r).second) grouped = false;
    }
    std::ostringstream os;
    os.precision(6);
    if (grouped && modes.size() > 1) {
        os << "| N |";
        for (const auto& m : modes) os << " " << m << " its | " << m << " kappa | " << m
                                       << " t_setup | " << m << " t_solve | " << m << " bound |";
        os << "\n|---|";
        for (size_t i = 0; i < modes.size(); ++i) os << "---|---|---|---|---|";
        os << "\n";
        for (int n : n_order) {
            os << "| " << n << " |";
            for (const auto& m : modes) {
                auto it = cell.find({n, m});
                if (it == cell.end()) {
                    os << " | | | | |";
                    continue;
                }
                const BenchRow* r = it->second;
                os << " " << r->iterations << " | " << r->kappa << " | " << r->t_setup << " | "
                   << r->t_solve << " | " << r->bound << " |";
            }
            os << "\n";
        }
        return os.str();
    }
    os << "| mode | N | its | kappa | t_setup | t_solve | coarse_dim | bound | bound_ok |\n";
    os << "|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : rows)
        os << "| " << r.mode << " | " << r.subdomains << " | " << r.iterations << " | " << r.kappa
           << " | " << r.t_setup << " | " << r.t_solve << " | " << r.coarse_dim << " | "
           << r.bound << " | " << (r.bound_ok ? "yes" : "no") << " |\n";
    return os.str();
}

void write_solution_csv(const StructuredMesh& mesh, const Vector& u, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    out << "dof,x,y,value\n";
    for (int d = 0; d < mesh.num_dofs(); ++d) {
        auto [x, y] = mesh.dof_coords(d);
        out << d << "," << x << "," << y << "," << u[d] << "\n";
    }
}

void export_artifacts(const ExperimentResult& result, const std::string& out_dir,
                      const ArtifactFlags& flags, int run_index) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + out_dir);
    const ExperimentConfig& cfg = result.config;
    std::string prefix = out_dir + "/run" + std::to_string(run_index);

    StructuredMesh mesh(cfg.nx, cfg.ny);
    if (flags.coefficient) {
        CoefficientField coeff = gen_coefficient(cfg.coeff, cfg.contrast, cfg.coeff_seed, mesh);
        write_coefficient_csv(coeff, mesh, prefix + "_coefficient.csv");
        write_coefficient_pgm(coeff, mesh, prefix + "_coefficient.pgm");
    }
    if (flags.matrix || flags.layout || flags.eigenvalues) {
        CoefficientField coeff = gen_coefficient(cfg.coeff, cfg.contrast, cfg.coeff_seed, mesh);
        GlobalSystem system = build_model_problem(mesh, coeff);
        SubdomainLayout layout = build_partition(mesh, cfg.px, cfg.py, cfg.overlap_layers,
                                                 cfg.star_layers, system.dirichlet);
        if (flags.matrix) write_matrix_market(system.A, prefix + "_matrix.mtx");
        if (flags.layout) write_layout_json(layout, prefix + "_layout.json");
        if (flags.matrix || flags.eigenvalues) {
            for (const auto& run : result.runs) {
                if (run.mode == "none") continue;
                CoarseOptions copts;
                copts.rule = cfg.mode_rule();
                copts.eig.dense_cap = cfg.eig_dense_cap;
                copts.eig.seed = cfg.seed;
                copts.threads = cfg.threads;
                CoarseMode cmode =
                    run.mode == "geneo" ? CoarseMode::geneo : CoarseMode::rgeneo;
                CoarseSpace cs = assemble_coarse(system, layout, cmode, copts);
                if (flags.eigenvalues)
                    write_eigenvalue_csv(cs, prefix + "_eigenvalues_" + run.mode + ".csv");
                if (flags.matrix) dump_pencils(system, layout, cs, out_dir + "/pencils");
            }
        }
    }
    for (const auto& run : result.runs) {
        if (flags.residuals)
            write_residual_csv(run.report, prefix + "_" + run.mode + "_residuals.csv");
        if (flags.solution)
            write_solution_csv(mesh, run.solution, prefix + "_" + run.mode + "_solution.csv");
        if (flags.theory && run.has_theory) {
            write_theory_json(run.theory, prefix + "_" + run.mode + "_theory.json");
            std::ofstream md(prefix + "_" + run.mode + "_theory.md");
            md << theory_markdown(run.theory);
        }
    }
}

}  // namespace schwarz
