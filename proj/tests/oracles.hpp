// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles, independent of the library's solve paths.
#pragma once

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

namespace oracles {

/// Dense Gaussian elimination with partial pivoting.
inline Eigen::VectorXd dense_lu_solve(Eigen::MatrixXd A, Eigen::VectorXd b) {
    const int n = static_cast<int>(A.rows());
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(A(i, k)) > std::abs(A(p, k))) p = i;
        if (A(p, k) == 0.0) throw std::runtime_error("dense_lu_solve: singular matrix");
        if (p != k) {
            A.row(k).swap(A.row(p));
            std::swap(b[k], b[p]);
        }
        for (int i = k + 1; i < n; ++i) {
            double f = A(i, k) / A(k, k);
            A.row(i).tail(n - k) -= f * A.row(k).tail(n - k);
            b[i] -= f * b[k];
        }
    }
    Eigen::VectorXd x(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
        x[i] = s / A(i, i);
    }
    return x;
}

/// Q1 stiffness by 2x2 Gauss quadrature on an hx-by-hy rectangle (exact for
/// constant alpha; computed from the shape-function gradients directly).
inline Eigen::Matrix4d q1_stiffness_quadrature(double alpha, double hx, double hy) {
    const double g = 1.0 / std::sqrt(3.0);
    const double pts[2] = {0.5 - 0.5 * g, 0.5 + 0.5 * g};
    Eigen::Matrix4d K = Eigen::Matrix4d::Zero();
    for (double xi : pts) {
        for (double eta : pts) {
            // counterclockwise nodes (0,0), (1,0), (1,1), (0,1)
            double dxi[4] = {-(1 - eta), (1 - eta), eta, -eta};
            double deta[4] = {-(1 - xi), -xi, xi, (1 - xi)};
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    double gx = dxi[i] / hx * dxi[j] / hx;
                    double gy = deta[i] / hy * deta[j] / hy;
                    K(i, j) += 0.25 * alpha * (gx + gy) * hx * hy;
                }
        }
    }
    return K;
}

inline std::mt19937_64 rng(unsigned long seed) { return std::mt19937_64(seed); }

inline Eigen::VectorXd random_vector(int n, std::mt19937_64& gen) {
    std::normal_distribution<double> dist;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = dist(gen);
    return v;
}

}  // namespace oracles
