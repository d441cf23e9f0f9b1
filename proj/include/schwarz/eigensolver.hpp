// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "schwarz/sparse.hpp"

namespace schwarz {

/// Result of a generalized symmetric eigensolve A t = lambda B t.
///
/// Only finite pairs are materialized, ascending; members of ker(B) carry
/// lambda = infinity and are represented by `num_infinite_known` (dense path)
/// or by `finite_exhausted` when the solve established that no further finite
/// pairs exist beyond `values`.
struct EigenPairs {
    std::vector<double> values;  // finite eigenvalues, ascending
    std::vector<double> theta;   // auxiliary spectrum theta = lambda/(1+lambda)
    DenseMatrix vectors;         // one column per finite pair
    int dim = 0;
    int num_infinite_known = 0;
    bool finite_exhausted = false;
};

struct GenEigOptions {
    /// Pencils up to this dimension use a dense symmetric-definite solve;
    /// larger ones use block inverse iteration with the A+B factorization.
    int dense_cap = 4000;
    /// theta >= 1 - infinite_tol is classified as lambda = infinity.
    double infinite_tol = 1e-10;
    /// theta <= zero_tol is treated as lambda = 0; such vectors keep their
    /// (A+B)-normalization instead of B-normalization.
    double zero_tol = 1e-14;
    /// Per-pair residual target, relative to (|A| + lambda |B|) |t|.
    double residual_tol = 1e-8;
    int max_iterations = 500;
    int block_extra = 10;
    unsigned long seed = 0x5eed;
};

/// Smallest m_request eigenpairs of the pencil (A, B), both positive
/// semidefinite with trivial kernel intersection. Solves the definite
/// auxiliary problem A t = theta (A+B) t and maps lambda = theta/(1-theta).
/// Finite-pair eigenvectors are B-orthonormal (except the lambda = 0 class,
/// which keeps the (A+B)-normalization; the two coincide at theta = 0).
EigenPairs gen_sym_eig(const SparseSymMatrix& A, const SparseSymMatrix& B, int m_request,
                       const GenEigOptions& opts = {});

}  // namespace schwarz
