// SPDX-License-Identifier: Apache-2.0
#include "schwarz/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace schwarz {

SparseSymMatrix SparseSymMatrix::from_triplets(int n, std::vector<Triplet> triplets) {
    if (n < 0) throw std::invalid_argument("SparseSymMatrix: negative dimension");
    for (auto& t : triplets) {
        if (t.i < 0 || t.i >= n || t.j < 0 || t.j >= n)
            throw std::invalid_argument("SparseSymMatrix: triplet index out of range");
        if (t.i > t.j) std::swap(t.i, t.j);
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });

    SparseSymMatrix A;
    A.n_ = n;
    A.row_ptr_.assign(static_cast<size_t>(n) + 1, 0);
    A.col_idx_.reserve(triplets.size());
    A.values_.reserve(triplets.size());
    size_t k = 0;
    for (int i = 0; i < n; ++i) {
        while (k < triplets.size() && triplets[k].i == i) {
            int j = triplets[k].j;
            double v = 0.0;
            while (k < triplets.size() && triplets[k].i == i && triplets[k].j == j) {
                v += triplets[k].v;
                ++k;
            }
            A.col_idx_.push_back(j);
            A.values_.push_back(v);
        }
        A.row_ptr_[static_cast<size_t>(i) + 1] = static_cast<int>(A.col_idx_.size());
    }
    return A;
}

double SparseSymMatrix::coeff(int i, int j) const {
    if (i > j) std::swap(i, j);
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
        if (col_idx_[k] == j) return values_[k];
    return 0.0;
}

Vector SparseSymMatrix::diagonal() const {
    Vector d = Vector::Zero(n_);
    for (int i = 0; i < n_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            if (col_idx_[k] == i) d[i] = values_[k];
    return d;
}

double SparseSymMatrix::inf_norm() const {
    Vector rowsum = Vector::Zero(n_);
    for (int i = 0; i < n_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            int j = col_idx_[k];
            double a = std::abs(values_[k]);
            rowsum[i] += a;
            if (j != i) rowsum[j] += a;
        }
    }
    return n_ == 0 ? 0.0 : rowsum.maxCoeff();
}

Vector SparseSymMatrix::apply(const Vector& x) const {
    if (x.size() != n_) throw std::invalid_argument("spmv: dimension mismatch");
    Vector y = Vector::Zero(n_);
    for (int i = 0; i < n_; ++i) {
        double xi = x[i];
        double yi = 0.0;
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            int j = col_idx_[k];
            double v = values_[k];
            yi += v * x[j];
            if (j != i) y[j] += v * xi;
        }
        y[i] += yi;
    }
    return y;
}

double SparseSymMatrix::quad_form(const Vector& x) const {
    if (x.size() != n_) throw std::invalid_argument("quad_form: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < n_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            int j = col_idx_[k];
            double t = values_[k] * x[i] * x[j];
            s += (i == j) ? t : 2.0 * t;
        }
    }
    return s;
}

SparseSymMatrix SparseSymMatrix::diag_scaled(const Vector& d) const {
    if (d.size() != n_) throw std::invalid_argument("diag_scaled: dimension mismatch");
    SparseSymMatrix B = *this;
    for (int i = 0; i < n_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            B.values_[k] = d[i] * values_[k] * d[col_idx_[k]];
    return B;
}

SparseSymMatrix SparseSymMatrix::plus(const SparseSymMatrix& other) const {
    if (other.n_ != n_) throw std::invalid_argument("plus: dimension mismatch");
    std::vector<Triplet> ts;
    ts.reserve(values_.size() + other.values_.size());
    for (int i = 0; i < n_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            ts.push_back({i, col_idx_[k], values_[k]});
        for (int k = other.row_ptr_[i]; k < other.row_ptr_[i + 1]; ++k)
            ts.push_back({i, other.col_idx_[k], other.values_[k]});
    }
    return from_triplets(n_, std::move(ts));
}

SparseSymMatrix SparseSymMatrix::submatrix(std::span<const int> keep) const {
    std::vector<int> map(static_cast<size_t>(n_), -1);
    for (size_t l = 0; l < keep.size(); ++l) {
        if (keep[l] < 0 || keep[l] >= n_) throw std::invalid_argument("submatrix: index out of range");
        if (l > 0 && keep[l] <= keep[l - 1]) throw std::invalid_argument("submatrix: indices must be sorted");
        map[keep[l]] = static_cast<int>(l);
    }
    std::vector<Triplet> ts;
    for (int i = 0; i < n_; ++i) {
        int li = map[i];
        if (li < 0) continue;
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            int lj = map[col_idx_[k]];
            if (lj >= 0) ts.push_back({li, lj, values_[k]});
        }
    }
    return from_triplets(static_cast<int>(keep.size()), std::move(ts));
}

SparseSymMatrix SparseSymMatrix::with_dirichlet_rows(std::span<const int> dofs) const {
    std::vector<char> flag(static_cast<size_t>(n_), 0);
    for (int d : dofs) flag[d] = 1;
    std::vector<Triplet> ts;
    ts.reserve(values_.size() + dofs.size());
    for (int i = 0; i < n_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            int j = col_idx_[k];
            if (!flag[i] && !flag[j]) ts.push_back({i, j, values_[k]});
        }
    }
    for (int d : dofs) ts.push_back({d, d, 1.0});
    return from_triplets(n_, std::move(ts));
}

SparseSymMatrix SparseSymMatrix::with_zeroed_rows(std::span<const int> dofs) const {
    std::vector<char> flag(static_cast<size_t>(n_), 0);
    for (int d : dofs) flag[d] = 1;
    std::vector<Triplet> ts;
    ts.reserve(values_.size());
    for (int i = 0; i < n_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            int j = col_idx_[k];
            if (!flag[i] && !flag[j]) ts.push_back({i, j, values_[k]});
        }
    }
    return from_triplets(n_, std::move(ts));
}

Eigen::SparseMatrix<double> SparseSymMatrix::to_eigen_full() const {
    std::vector<Eigen::Triplet<double>> ts;
    ts.reserve(2 * values_.size());
    for (int i = 0; i < n_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            int j = col_idx_[k];
            ts.emplace_back(i, j, values_[k]);
            if (j != i) ts.emplace_back(j, i, values_[k]);
        }
    }
    Eigen::SparseMatrix<double> M(n_, n_);
    M.setFromTriplets(ts.begin(), ts.end());
    return M;
}

DenseMatrix SparseSymMatrix::to_dense() const {
    DenseMatrix M = DenseMatrix::Zero(n_, n_);
    for (int i = 0; i < n_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            int j = col_idx_[k];
            M(i, j) = values_[k];
            M(j, i) = values_[k];
        }
    }
    return M;
}

Vector spmv(const SparseSymMatrix& A, const Vector& x) { return A.apply(x); }

void write_matrix_market(const SparseSymMatrix& A, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << A.rows() << " " << A.rows() << " " << A.stored_nnz() << "\n";
    out.precision(17);
    const auto& rp = A.row_ptr();
    const auto& ci = A.col_idx();
    const auto& v = A.values();
    // Matrix Market symmetric format stores the lower triangle (row >= col);
    // our upper-triangle entries are emitted transposed.
    for (int i = 0; i < A.rows(); ++i)
        for (int k = rp[i]; k < rp[i + 1]; ++k)
            out << ci[k] + 1 << " " << i + 1 << " " << v[k] << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

SparseSymMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty Matrix Market file: " + path);
    {
        std::istringstream banner(line);
        std::string mm, obj, fmt, field, sym;
        banner >> mm >> obj >> fmt >> field >> sym;
        if (mm != "%%MatrixMarket" || obj != "matrix" || fmt != "coordinate" || field != "real" ||
            sym != "symmetric")
            throw std::runtime_error("unsupported Matrix Market header in " + path);
    }
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream sizes(line);
    int nr = 0, nc = 0;
    long long nnz = 0;
    sizes >> nr >> nc >> nnz;
    if (nr != nc) throw std::runtime_error("matrix is not square: " + path);
    std::vector<Triplet> ts;
    ts.reserve(static_cast<size_t>(nnz));
    for (long long k = 0; k < nnz; ++k) {
        int i = 0, j = 0;
        double v = 0.0;
        if (!(in >> i >> j >> v)) throw std::runtime_error("truncated Matrix Market file: " + path);
        ts.push_back({i - 1, j - 1, v});
    }
    return SparseSymMatrix::from_triplets(nr, std::move(ts));
}

}  // namespace schwarz
