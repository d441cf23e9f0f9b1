// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "schwarz/coarse.hpp"
#include "schwarz/krylov.hpp"
#include "schwarz/preconditioner.hpp"

namespace schwarz {

struct ProjectionDefects {
    double orthogonality = 0.0;    // |a(Pv, v - Pv)| / |v|_a^2
    double projection_growth = 0.0;  // |Pv|_a / |v|_a
    double remainder_growth = 0.0;   // |v - Pv|_a / |v|_a
    double stability_ratio = 0.0;    // lambda_{m+1} |eta (v - Pv)|_b^2 / |v - Pv|_a^2
};

/// Spectral projection onto the retained modes of a local pencil, with the
/// measured defects of its orthogonality and stability estimates.
std::pair<Vector, ProjectionDefects> local_projection(const LocalEigenProblem& pencil,
                                                      const EigenPairs& pairs, int m_j,
                                                      double lambda_next, const Vector& v);

struct DecompositionResult {
    Vector z0;                 // coarse component (global dofs)
    std::vector<Vector> z;     // one local component per subdomain (global dofs)
    double energy_z0 = 0.0;
    double energy_total = 0.0;   // |z0|_a^2 + sum_j |z_j|_{a,subdomain}^2
    double energy_u = 0.0;
    double energy_ratio = 0.0;   // energy_total / energy_u
    double reconstruction_error = 0.0;  // |sum z - u| / |u|
};

/// Splits u into a coarse component plus per-subdomain components via the
/// local spectral projections; the split reconstructs u exactly through the
/// partition of unity. Requires a coarse space built with analysis data.
DecompositionResult stable_decomposition(const GlobalSystem& system, const SubdomainLayout& layout,
                                         const CoarseSpace& coarse, const Vector& u);

struct TheoryReport {
    std::string mode;
    int k0 = 1;
    std::vector<double> lambda_next;  // per subdomain
    double c1_implied = 0.0;          // max_j of the mode-dependent term
    double c0_squared = 0.0;
    double bound = 0.0;               // (1 + k0) * c0_squared
    double kappa_measured = 0.0;
    bool bound_satisfied = false;
    // Sampled defects (maxima over subdomains and samples):
    int projection_samples = 0;
    double max_orthogonality_defect = 0.0;
    double max_projection_growth = 0.0;
    double max_stability_ratio = 0.0;
    int decomposition_samples = 0;
    double max_energy_ratio = 0.0;
    double max_reconstruction_error = 0.0;
    bool decomposition_within_c0 = false;
};

/// The mode-dependent eigenvalue term of the stability constant:
/// 2 + 3/lambda for the strip space, 1 + 1/lambda for the classical one.
double mode_term(CoarseMode mode, double lambda_next);

/// Evaluates the condition-number bound from the recorded eigenvalues and
/// compares it with the measured estimate.
TheoryReport condition_bounds(const SubdomainLayout& layout, const CoarseSpace& coarse,
                              const SolveReport& report);

/// Full verification pass: condition bound, sampled projection defects and
/// sampled stable decompositions. `precond` (optional) supplies the
/// operator-filtered global samples.
TheoryReport verify_theory(const GlobalSystem& system, const SubdomainLayout& layout,
                           const CoarseSpace& coarse, const SolveReport& report,
                           int projection_samples, int decomposition_samples, unsigned long seed,
                           const SchwarzPreconditioner* precond = nullptr);

void write_theory_json(const TheoryReport& report, const std::string& path);
std::string theory_markdown(const TheoryReport& report);

}  // namespace schwarz
