// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "schwarz/sparse.hpp"

namespace schwarz {

struct PcgOptions {
    double tol = 1e-10;
    int maxit = 500;
    /// Stop on the preconditioned residual norm instead of the default
    /// unpreconditioned one.
    bool precond_norm_stopping = false;
    bool record_iterates = false;  // test support, off in production runs
};

struct SolveReport {
    int iterations = 0;
    bool converged = false;
    std::string stopping_norm = "unpreconditioned";  // norm used by the stop test
    std::vector<double> residual_history;          // relative |r|, per iteration
    std::vector<double> precond_residual_history;  // relative sqrt(r.z)
    double final_true_relative_residual = 0.0;
    double kappa = 1.0;
    double ritz_min = 0.0;
    double ritz_max = 0.0;
    double t_setup = 0.0;
    double t_solve = 0.0;
    double t_factor = 0.0;  // setup split: subdomain factorizations
    double t_eigen = 0.0;   // setup split: local eigenproblems + extensions
    double t_coarse = 0.0;  // setup split: coarse assembly + factorization
    std::vector<double> alpha;  // CG coefficients for the Lanczos estimate
    std::vector<double> beta;
    std::vector<Vector> iterates;
};

using LinearOperator = std::function<Vector(const Vector&)>;

/// Preconditioned conjugate gradients for SPD A and M with zero initial
/// guess. Stores the CG recurrence coefficients for the condition estimate.
std::pair<Vector, SolveReport> pcg(const SparseSymMatrix& A, const LinearOperator& precond,
                                   const Vector& f, const PcgOptions& opts = {});

struct ConditionEstimate {
    double kappa = 1.0;
    double ritz_min = 0.0;
    double ritz_max = 0.0;
};

/// Extreme eigenvalues of the Lanczos tridiagonal implicit in the CG
/// coefficients; their ratio estimates kappa of the preconditioned operator.
/// Fewer than two iterations yield kappa = 1.
ConditionEstimate lanczos_condition_estimate(const std::vector<double>& alpha,
                                             const std::vector<double>& beta);

void write_residual_csv(const SolveReport& report, const std::string& path);

}  // namespace schwarz
