// SPDX-License-Identifier: Apache-2.0
#include "schwarz/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "schwarz/factorization.hpp"

namespace schwarz {

namespace {

[[noreturn]] void kernel_intersection_error() {
    throw std::runtime_error(
        "gen_sym_eig: A+B is numerically singular; the pencil requires "
        "ker(A) and ker(B) to intersect trivially");
}

double lambda_of_theta(double theta) { return theta / (1.0 - theta); }

// Scales finite-pair eigenvectors: B-orthonormal where theta > zero_tol
// (b(t,t) = 1 - theta for (A+B)-orthonormal t), (A+B)-normalized otherwise.
void normalize_pairs(EigenPairs& out, const GenEigOptions& opts) {
    for (size_t k = 0; k < out.values.size(); ++k) {
        double th = out.theta[k];
        if (th > opts.zero_tol) out.vectors.col(static_cast<int>(k)) /= std::sqrt(1.0 - th);
    }
}

EigenPairs dense_path(const SparseSymMatrix& A, const SparseSymMatrix& B, int m_request,
                      const GenEigOptions& opts) {
    const int n = A.rows();
    DenseMatrix Ad = A.to_dense();
    DenseMatrix Sd = Ad + B.to_dense();
    {
        Eigen::LLT<DenseMatrix> chk(Sd);
        if (chk.info() != Eigen::Success) kernel_intersection_error();
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> es(Ad, Sd,
                                                             Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) kernel_intersection_error();

    int n_finite = 0;
    while (n_finite < n && es.eigenvalues()[n_finite] < 1.0 - opts.infinite_tol) ++n_finite;

    EigenPairs out;
    out.dim = n;
    out.num_infinite_known = n - n_finite;
    int m = std::min(m_request, n_finite);
    out.finite_exhausted = (m == n_finite);
    out.values.resize(m);
    out.theta.resize(m);
    out.vectors = es.eigenvectors().leftCols(m);
    for (int k = 0; k < m; ++k) {
        double th = std::clamp(es.eigenvalues()[k], 0.0, 1.0);
        out.theta[k] = th;
        out.values[k] = lambda_of_theta(th);
    }
    normalize_pairs(out, opts);
    return out;
}

// Block inverse iteration for the complementary pencil B t = mu (A+B) t,
// mu = 1 - theta: repeated application of (A+B)^{-1} B with Rayleigh-Ritz in
// the (A+B) inner product converges to the largest mu, i.e. the smallest
// lambda. Members of ker(B) are annihilated by the iteration operator.
EigenPairs iterative_path(const SparseSymMatrix& A, const SparseSymMatrix& B, int m_request,
                          const GenEigOptions& opts) {
    const int n = A.rows();
    Eigen::SparseMatrix<double> Ae = A.to_eigen_full();
    Eigen::SparseMatrix<double> Be = B.to_eigen_full();
    Factorization S = [&] {
        try {
            return factorize(A.plus(B));
        } catch (const std::runtime_error&) {
            kernel_intersection_error();
        }
    }();
    Eigen::SparseMatrix<double> Se = Ae + Be;

    const double normA = A.inf_norm();
    const double normB = B.inf_norm();
    const int q = std::min(n, m_request + std::max(opts.block_extra, m_request));

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> dist;
    DenseMatrix X(n, q);
    for (int j = 0; j < q; ++j)
        for (int i = 0; i < n; ++i) X(i, j) = dist(rng);

    Vector mu = Vector::Zero(q);
    for (int it = 0; it < opts.max_iterations; ++it) {
        if (it > 0) X = S.solve(DenseMatrix(Be * X));

        // (A+B)-orthonormalize the block.
        DenseMatrix G = X.transpose() * (Se * X);
        Eigen::LLT<DenseMatrix> gll(G);
        int retries = 0;
        while (gll.info() != Eigen::Success && retries < 3) {
            for (int j = 0; j < q; ++j)
                for (int i = 0; i < n; ++i) X(i, j) += 1e-8 * dist(rng);
            G = X.transpose() * (Se * X);
            gll.compute(G);
            ++retries;
        }
        if (gll.info() != Eigen::Success)
            throw std::runtime_error("gen_sym_eig: block orthonormalization failed");
        X = gll.matrixL().solve(X.transpose()).transpose();

        // Rayleigh-Ritz for the pencil (B, A+B) on the block.
        DenseMatrix BX = Be * X;
        DenseMatrix P = X.transpose() * BX;
        Eigen::SelfAdjointEigenSolver<DenseMatrix> small(P);
        if (small.info() != Eigen::Success)
            throw std::runtime_error("gen_sym_eig: Ritz solve failed");
        // Descending mu = ascending lambda.
        DenseMatrix V(q, q);
        for (int j = 0; j < q; ++j) {
            V.col(j) = small.eigenvectors().col(q - 1 - j);
            mu[j] = small.eigenvalues()[q - 1 - j];
        }
        X = X * V;

        if (it < 2) continue;
        bool converged = true;
        for (int k = 0; k < m_request && converged; ++k) {
            if (mu[k] <= opts.infinite_tol) break;  // finite part exhausted
            double lam = lambda_of_theta(1.0 - mu[k]);
            Vector xk = X.col(k);
            double resid = (Ae * xk - lam * (Be * xk)).norm();
            double scale = (normA + lam * normB) * xk.norm();
            if (resid > opts.residual_tol * scale) converged = false;
        }
        if (converged) break;
        if (it + 1 == opts.max_iterations)
            throw std::runtime_error("gen_sym_eig: inverse iteration did not converge");
    }

    int m = 0;
    while (m < m_request && mu[m] > opts.infinite_tol) ++m;

    EigenPairs out;
    out.dim = n;
    out.finite_exhausted = (m < m_request) || (m == n);
    out.num_infinite_known = out.finite_exhausted ? n - m : 0;
    out.values.resize(m);
    out.theta.resize(m);
    out.vectors = DenseMatrix(n, m);
    // mu descending over columns is already ascending lambda.
    for (int k = 0; k < m; ++k) {
        double th = std::clamp(1.0 - mu[k], 0.0, 1.0);
        out.theta[k] = th;
        out.values[k] = lambda_of_theta(th);
        out.vectors.col(k) = X.col(k);
    }
    normalize_pairs(out, opts);
    return out;
}

}  // namespace

EigenPairs gen_sym_eig(const SparseSymMatrix& A, const SparseSymMatrix& B, int m_request,
                       const GenEigOptions& opts) {
    if (A.rows() != B.rows()) throw std::invalid_argument("gen_sym_eig: dimension mismatch");
    const int n = A.rows();
    if (n == 0) return {};
    m_request = std::min(std::max(m_request, 1), n);
    if (n <= opts.dense_cap) return dense_path(A, B, m_request, opts);
    try {
        return iterative_path(A, B, m_request, opts);
    } catch (const std::runtime_error& e) {
        // Fall back to the dense solve rather than return unconverged pairs.
        if (std::string(e.what()).find("did not converge") == std::string::npos) throw;
        return dense_path(A, B, m_request, opts);
    }
}

}  // namespace schwarz
