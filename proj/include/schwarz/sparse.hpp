// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace schwarz {

using Vector = Eigen::VectorXd;

/// Dense matrix type used for coarse operators and eigenvector blocks.
/// Column-major storage (Eigen default).
using DenseMatrix = Eigen::MatrixXd;

struct Triplet {
    int i = 0;
    int j = 0;
    double v = 0.0;
};

/// Compressed sparse symmetric matrix. Only the upper triangle (j >= i) is
/// stored; all products and norms use full symmetric semantics. Column
/// indices are strictly increasing within each row.
class SparseSymMatrix {
public:
    SparseSymMatrix() = default;

    /// Builds from (i,j,v) triplets. Entries are mirrored to the upper
    /// triangle and duplicates are summed.
    static SparseSymMatrix from_triplets(int n, std::vector<Triplet> triplets);

    int rows() const { return n_; }
    int stored_nnz() const { return static_cast<int>(values_.size()); }

    /// Entry lookup (either triangle); zero if not stored.
    double coeff(int i, int j) const;

    Vector diagonal() const;

    /// max_i sum_j |A_ij| over the full symmetric pattern.
    double inf_norm() const;

    /// y = A x with symmetric semantics.
    Vector apply(const Vector& x) const;

    /// x^T A x.
    double quad_form(const Vector& x) const;

    /// D A D for a diagonal matrix D given by `d`.
    SparseSymMatrix diag_scaled(const Vector& d) const;

    SparseSymMatrix plus(const SparseSymMatrix& other) const;

    /// Symmetric extraction A[keep, keep]; `keep` must be sorted ascending.
    SparseSymMatrix submatrix(std::span<const int> keep) const;

    /// Zeroes rows/columns listed in `dofs` and puts 1 on their diagonal.
    SparseSymMatrix with_dirichlet_rows(std::span<const int> dofs) const;

    /// Zeroes rows/columns listed in `dofs` (no diagonal replacement).
    SparseSymMatrix with_zeroed_rows(std::span<const int> dofs) const;

    /// Full (both triangles) Eigen view, for factorizations.
    Eigen::SparseMatrix<double> to_eigen_full() const;

    DenseMatrix to_dense() const;

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }

private:
    int n_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

/// Free-function form of the symmetric sparse product.
Vector spmv(const SparseSymMatrix& A, const Vector& x);

/// Matrix Market coordinate (real, symmetric) export/import.
void write_matrix_market(const SparseSymMatrix& A, const std::string& path);
SparseSymMatrix read_matrix_market(const std::string& path);

}  // namespace schwarz
