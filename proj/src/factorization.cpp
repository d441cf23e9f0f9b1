// SPDX-License-Identifier: Apache-2.0
#include "schwarz/factorization.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace schwarz {

namespace {

// Locates the first non-positive pivot via an LDL^T pass, mapping back to the
// original dof index through the fill-reducing permutation.
[[noreturn]] void report_pivot_failure(const Eigen::SparseMatrix<double>& M) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
    ldlt.compute(M);
    int failing = -1;
    const auto& D = ldlt.vectorD();
    for (int k = 0; k < D.size(); ++k) {
        if (!(D[k] > 0.0) || !std::isfinite(D[k])) {
            failing = ldlt.permutationPinv().indices()[k];
            break;
        }
    }
    throw std::runtime_error(
        "factorize: matrix is not positive definite (non-positive pivot at index " +
        std::to_string(failing) + ")");
}

}  // namespace

Factorization::Factorization(const SparseSymMatrix& A) : n_(A.rows()) {
    Eigen::SparseMatrix<double> M = A.to_eigen_full();
    llt_ = std::make_shared<Solver>();
    llt_->compute(M);
    if (llt_->info() != Eigen::Success) report_pivot_failure(M);
}

Vector Factorization::solve(const Vector& b) const {
    if (!llt_) throw std::runtime_error("solve_factored: empty factorization");
    if (b.size() != n_) throw std::invalid_argument("solve_factored: dimension mismatch");
    return llt_->solve(b);
}

DenseMatrix Factorization::solve(const DenseMatrix& B) const {
    if (!llt_) throw std::runtime_error("solve_factored: empty factorization");
    if (B.rows() != n_) throw std::invalid_argument("solve_factored: dimension mismatch");
    return llt_->solve(B);
}

Factorization factorize(const SparseSymMatrix& A) { return Factorization(A); }

Vector solve_factored(const Factorization& F, const Vector& b) { return F.solve(b); }

}  // namespace schwarz
