// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include "schwarz/sparse.hpp"

namespace schwarz {

/// Sparse Cholesky factorization of an SPD matrix with AMD fill-reducing
/// ordering. Factoring an indefinite or singular matrix throws, naming the
/// failing pivot.
class Factorization {
public:
    Factorization() = default;
    explicit Factorization(const SparseSymMatrix& A);

    int rows() const { return n_; }
    bool valid() const { return static_cast<bool>(llt_); }

    Vector solve(const Vector& b) const;
    DenseMatrix solve(const DenseMatrix& B) const;

private:
    using Solver = Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                                        Eigen::AMDOrdering<int>>;
    std::shared_ptr<Solver> llt_;
    int n_ = 0;
};

Factorization factorize(const SparseSymMatrix& A);
Vector solve_factored(const Factorization& F, const Vector& b);

}  // namespace schwarz
