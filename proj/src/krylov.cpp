// SPDX-License-Identifier: Apache-2.0
#include "schwarz/krylov.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace schwarz {

std::pair<Vector, SolveReport> pcg(const SparseSymMatrix& A, const LinearOperator& precond,
                                   const Vector& f, const PcgOptions& opts) {
    if (f.size() != A.rows()) throw std::invalid_argument("pcg: dimension mismatch");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("pcg: tol must be positive");

    SolveReport rep;
    rep.stopping_norm = opts.precond_norm_stopping ? "preconditioned" : "unpreconditioned";
    const int n = A.rows();
    Vector x = Vector::Zero(n);
    Vector r = f;
    Vector z = precond(r);
    Vector p = z;
    double rz = r.dot(z);
    const double r0 = r.norm();
    const double rz0 = std::sqrt(std::max(rz, 0.0));
    if (r0 == 0.0) {
        rep.converged = true;
        return {x, rep};
    }

    for (int it = 0; it < opts.maxit; ++it) {
        Vector Ap = A.apply(p);
        double pAp = p.dot(Ap);
        if (!(pAp > 0.0))
            throw std::runtime_error("pcg: breakdown, operator is not positive definite");
        double a = rz / pAp;
        x += a * p;
        r -= a * Ap;
        rep.alpha.push_back(a);
        if (opts.record_iterates) rep.iterates.push_back(x);

        double rel = r.norm() / r0;
        rep.residual_history.push_back(rel);
        Vector z_new = precond(r);
        double rz_new = r.dot(z_new);
        double prel = rz0 > 0.0 ? std::sqrt(std::max(rz_new, 0.0)) / rz0 : 0.0;
        rep.precond_residual_history.push_back(prel);
        rep.iterations = it + 1;

        double stop_value = opts.precond_norm_stopping ? prel : rel;
        if (stop_value <= opts.tol) {
            rep.converged = true;
            break;
        }
        double b = rz_new / rz;
        rep.beta.push_back(b);
        rz = rz_new;
        p = z_new + b * p;
    }

    rep.final_true_relative_residual = (f - A.apply(x)).norm() / r0;
    auto est = lanczos_condition_estimate(rep.alpha, rep.beta);
    rep.kappa = est.kappa;
    rep.ritz_min = est.ritz_min;
    rep.ritz_max = est.ritz_max;
    return {x, rep};
}

ConditionEstimate lanczos_condition_estimate(const std::vector<double>& alpha,
                                             const std::vector<double>& beta) {
    ConditionEstimate est;
    const int k = static_cast<int>(alpha.size());
    if (k < 2) return est;
    DenseMatrix T = DenseMatrix::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        T(i, i) = 1.0 / alpha[i];
        if (i > 0) T(i, i) += beta[i - 1] / alpha[i - 1];
        if (i + 1 < k) {
            double off = std::sqrt(std::max(beta[i], 0.0)) / alpha[i];
            T(i, i + 1) = off;
            T(i + 1, i) = off;
        }
    }
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(T);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("lanczos_condition_estimate: tridiagonal eigensolve failed");
    est.ritz_min = es.eigenvalues()[0];
    est.ritz_max = es.eigenvalues()[k - 1];
    est.kappa = est.ritz_min > 0.0 ? est.ritz_max / est.ritz_min : 1.0;
    return est;
}

void write_residual_csv(const SolveReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    out << "iteration,relative_residual,preconditioned_relative_residual\n";
    for (size_t i = 0; i < report.residual_history.size(); ++i)
        out << i + 1 << "," << report.residual_history[i] << ","
            << report.precond_residual_history[i] << "\n";
}

}  // namespace schwarz
