// SPDX-License-Identifier: Apache-2.0
#include "schwarz/theory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace schwarz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::pair<Vector, ProjectionDefects> local_projection(const LocalEigenProblem& pencil,
                                                      const EigenPairs& pairs, int m_j,
                                                      double lambda_next, const Vector& v) {
    if (v.size() != pencil.left.rows())
        throw std::invalid_argument("local_projection: dimension mismatch");
    if (m_j > static_cast<int>(pairs.values.size()))
        throw std::invalid_argument("local_projection: m_j exceeds available pairs");
    if (!(lambda_next > 0.0))
        throw std::invalid_argument("local_projection: lambda_{m_j+1} must be positive");

    Vector Bv = pencil.right.apply(v);
    Vector pv = Vector::Zero(v.size());
    for (int k = 0; k < m_j; ++k) pv += pairs.vectors.col(k).dot(Bv) * pairs.vectors.col(k);
    Vector w = v - pv;

    ProjectionDefects d;
    double av = pencil.left.quad_form(v);
    double aw = pencil.left.quad_form(w);
    double apv = pencil.left.quad_form(pv);
    double bw = pencil.right.quad_form(w);
    double scale = std::max(av, 1e-300);
    d.orthogonality = std::abs(pv.dot(pencil.left.apply(w))) / scale;
    d.projection_growth = std::sqrt(std::max(apv, 0.0) / scale);
    d.remainder_growth = std::sqrt(std::max(aw, 0.0) / scale);
    if (std::isinf(lambda_next))
        d.stability_ratio = (bw <= 1e-10 * scale) ? 0.0 : kInf;
    else
        d.stability_ratio = lambda_next * bw / std::max(aw, 1e-14 * scale);
    return {pv, d};
}

DecompositionResult stable_decomposition(const GlobalSystem& system, const SubdomainLayout& layout,
                                         const CoarseSpace& coarse, const Vector& u) {
    if (coarse.analysis.empty())
        throw std::invalid_argument("stable_decomposition: coarse space lacks analysis data");
    const int n = system.mesh.num_dofs();
    if (u.size() != n) throw std::invalid_argument("stable_decomposition: dimension mismatch");
    const int N = layout.num_subdomains();

    DecompositionResult res;
    res.z0 = Vector::Zero(n);
    res.z.resize(N);
    for (int j = 0; j < N; ++j) {
        const Subdomain& sd = layout.subdomains[j];
        const SubdomainSpectralData& data = coarse.analysis[j];
        const int m_j = coarse.m_per_subdomain[j];
        Vector proj = Vector::Zero(static_cast<int>(sd.dofs.size()));
        if (data.pencil.subdomain == j && m_j > 0) {
            Vector v_loc(static_cast<int>(data.pencil.dofs.size()));
            for (size_t i = 0; i < data.pencil.dofs.size(); ++i)
                v_loc[static_cast<int>(i)] = u[data.pencil.dofs[i]];
            Vector Bv = data.pencil.right.apply(v_loc);
            for (int k = 0; k < m_j; ++k)
                proj += data.pairs.vectors.col(k).dot(Bv) * data.y.col(k);
        }
        Vector zj = Vector::Zero(n);
        for (size_t i = 0; i < sd.dofs.size(); ++i) {
            int d = sd.dofs[i];
            double xi = sd.xi[static_cast<int>(i)];
            res.z0[d] += xi * proj[static_cast<int>(i)];
            zj[d] = xi * (u[d] - proj[static_cast<int>(i)]);
        }
        res.z[j] = std::move(zj);
    }

    std::vector<int> all_elements(static_cast<size_t>(system.mesh.num_elements()));
    for (int e = 0; e < system.mesh.num_elements(); ++e) all_elements[e] = e;
    res.energy_z0 = energy(system.mesh, system.coeff, all_elements, res.z0);
    res.energy_u = energy(system.mesh, system.coeff, all_elements, u);
    res.energy_total = res.energy_z0;
    Vector sum = res.z0;
    for (int j = 0; j < N; ++j) {
        res.energy_total +=
            energy(system.mesh, system.coeff, layout.subdomains[j].elements, res.z[j]);
        sum += res.z[j];
    }
    double unorm = u.norm();
    res.reconstruction_error = unorm > 0.0 ? (sum - u).norm() / unorm : (sum - u).norm();
    res.energy_ratio = res.energy_u > 0.0 ? res.energy_total / res.energy_u : 0.0;
    return res;
}

double mode_term(CoarseMode mode, double lambda_next) {
    if (std::isinf(lambda_next)) return mode == CoarseMode::rgeneo ? 2.0 : 1.0;
    return mode == CoarseMode::rgeneo ? 2.0 + 3.0 / lambda_next : 1.0 + 1.0 / lambda_next;
}

TheoryReport condition_bounds(const SubdomainLayout& layout, const CoarseSpace& coarse,
                              const SolveReport& report) {
    TheoryReport tr;
    tr.mode = to_string(coarse.mode);
    tr.k0 = layout.k0;
    tr.lambda_next = coarse.lambda_next;
    if (static_cast<int>(coarse.lambda_next.size()) != layout.num_subdomains())
        throw std::runtime_error("condition_bounds: missing per-subdomain eigenvalue data");
    double max_term = 0.0;
    for (int j = 0; j < layout.num_subdomains(); ++j) {
        if (layout.subdomains[j].overlap_elements.empty()) continue;
        if (std::isnan(coarse.lambda_next[j]))
            throw std::runtime_error("condition_bounds: missing eigenvalue data for subdomain " +
                                     std::to_string(j));
        max_term = std::max(max_term, mode_term(coarse.mode, coarse.lambda_next[j]));
    }
    const double k0 = tr.k0;
    tr.c1_implied = max_term;
    tr.c0_squared = 2.0 + k0 * (2.0 * k0 + 1.0) * max_term;
    tr.bound = (1.0 + k0) * tr.c0_squared;
    tr.kappa_measured = report.kappa;
    tr.bound_satisfied = tr.kappa_measured <= tr.bound;
    return tr;
}

TheoryReport verify_theory(const GlobalSystem& system, const SubdomainLayout& layout,
                           const CoarseSpace& coarse, const SolveReport& report,
                           int projection_samples, int decomposition_samples, unsigned long seed,
                           const SchwarzPreconditioner* precond) {
    TheoryReport tr = condition_bounds(layout, coarse, report);
    if (coarse.analysis.empty()) return tr;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;

    for (int j = 0; j < layout.num_subdomains(); ++j) {
        const SubdomainSpectralData& data = coarse.analysis[j];
        if (data.pencil.subdomain != j) continue;
        int m_j = coarse.m_per_subdomain[j];
        double lam = coarse.lambda_next[j];
        if (!(lam > 0.0)) continue;
        std::vector<char> dir_local(data.pencil.dofs.size(), 0);
        for (size_t i = 0; i < data.pencil.dofs.size(); ++i)
            dir_local[i] = system.is_dirichlet[data.pencil.dofs[i]];
        for (int s = 0; s < projection_samples; ++s) {
            Vector v(static_cast<int>(data.pencil.dofs.size()));
            for (int i = 0; i < v.size(); ++i) v[i] = dir_local[i] ? 0.0 : dist(rng);
            auto [pv, d] = local_projection(data.pencil, data.pairs, m_j, lam, v);
            tr.max_orthogonality_defect = std::max(tr.max_orthogonality_defect, d.orthogonality);
            tr.max_projection_growth = std::max(tr.max_projection_growth, d.projection_growth);
            tr.max_stability_ratio = std::max(tr.max_stability_ratio, d.stability_ratio);
            ++tr.projection_samples;
        }
    }

    const int n = system.mesh.num_dofs();
    for (int s = 0; s < decomposition_samples; ++s) {
        Vector u(n);
        for (int i = 0; i < n; ++i) u[i] = system.is_dirichlet[i] ? 0.0 : dist(rng);
        if (precond && s % 2 == 1) {
            // operator-filtered sample: one preconditioned operator application
            u = precond->apply(system.A.apply(u));
            for (int d : system.dirichlet) u[d] = 0.0;
        }
        DecompositionResult dec = stable_decomposition(system, layout, coarse, u);
        tr.max_energy_ratio = std::max(tr.max_energy_ratio, dec.energy_ratio);
        tr.max_reconstruction_error =
            std::max(tr.max_reconstruction_error, dec.reconstruction_error);
        ++tr.decomposition_samples;
    }
    tr.decomposition_within_c0 = tr.max_energy_ratio <= tr.c0_squared;
    return tr;
}

void write_theory_json(const TheoryReport& tr, const std::string& path) {
    nlohmann::json j;
    j["mode"] = tr.mode;
    j["k0"] = tr.k0;
    j["lambda_next"] = nlohmann::json::array();
    for (double v : tr.lambda_next)
        j["lambda_next"].push_back(std::isinf(v) ? "inf" : nlohmann::json(v));
    j["c1_implied"] = tr.c1_implied;
    j["c0_squared"] = tr.c0_squared;
    j["bound"] = tr.bound;
    j["kappa_measured"] = tr.kappa_measured;
    j["bound_satisfied"] = tr.bound_satisfied;
    j["projection_samples"] = tr.projection_samples;
    j["max_orthogonality_defect"] = tr.max_orthogonality_defect;
    j["max_projection_growth"] = tr.max_projection_growth;
    j["max_stability_ratio"] = tr.max_stability_ratio;
    j["decomposition_samples"] = tr.decomposition_samples;
    j["max_energy_ratio"] = tr.max_energy_ratio;
    j["max_reconstruction_error"] = tr.max_reconstruction_error;
    j["decomposition_within_c0"] = tr.decomposition_within_c0;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(1) << "\n";
}

std::string theory_markdown(const TheoryReport& tr) {
    std::ostringstream os;
    os.precision(6);
    os << "| quantity | value |\n|---|---|\n";
    os << "| mode | " << tr.mode << " |\n";
    os << "| k0 | " << tr.k0 << " |\n";
    os << "| C1 (implied) | " << tr.c1_implied << " |\n";
    os << "| C0^2 | " << tr.c0_squared << " |\n";
    os << "| bound (1+k0) C0^2 | " << tr.bound << " |\n";
    os << "| measured kappa | " << tr.kappa_measured << " |\n";
    os << "| bound satisfied | " << (tr.bound_satisfied ? "yes" : "no") << " |\n";
    if (tr.projection_samples > 0) {
        os << "| max orthogonality defect | " << tr.max_orthogonality_defect << " |\n";
        os << "| max stability ratio | " << tr.max_stability_ratio << " |\n";
    }
    if (tr.decomposition_samples > 0) {
        os << "| max energy ratio | " << tr.max_energy_ratio << " |\n";
        os << "| max reconstruction error | " << tr.max_reconstruction_error << " |\n";
    }
    return os.str();
}

}  // namespace schwarz
