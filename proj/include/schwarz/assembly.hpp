// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "schwarz/coefficient.hpp"
#include "schwarz/mesh.hpp"
#include "schwarz/sparse.hpp"

namespace schwarz {

/// Q1 element stiffness block in counterclockwise corner ordering.
struct ElementMatrix {
    Eigen::Matrix4d k = Eigen::Matrix4d::Zero();
    int element = -1;
};

/// Exact stiffness matrix of integral(alpha grad u . grad v) over an
/// hx-by-hy rectangle with elementwise-constant alpha.
ElementMatrix element_stiffness(double alpha, double hx, double hy);

/// Global Neumann matrix: sum of scattered element matrices. Positive
/// semidefinite with the constants as kernel.
SparseSymMatrix assemble(const StructuredMesh& mesh, const CoefficientField& coeff);

/// Sub-assembled matrix over an element set, on the dofs incident to it,
/// with the sorted local-to-global dof map. No boundary conditions applied.
struct LocalMatrix {
    SparseSymMatrix A;
    std::vector<int> dofs;  // local index -> global dof, sorted ascending
};
LocalMatrix sub_assemble(const StructuredMesh& mesh, const CoefficientField& coeff,
                         std::span<const int> elements);

/// Sorted unique dofs incident to an element set.
std::vector<int> dofs_of_elements(const StructuredMesh& mesh, std::span<const int> elements);

/// Assembled system after keep-in-system Dirichlet elimination: Dirichlet
/// rows/columns of A are identity, their couplings moved into f, and the
/// pre-elimination element-sum matrix is retained for local sub-assembly.
struct GlobalSystem {
    StructuredMesh mesh;
    CoefficientField coeff;
    SparseSymMatrix A;
    SparseSymMatrix A_neumann;
    Vector f;
    std::vector<int> dirichlet;  // sorted dof ids
    Vector dirichlet_values;     // aligned with `dirichlet`
    std::vector<char> is_dirichlet;

    GlobalSystem(StructuredMesh m, CoefficientField c) : mesh(m), coeff(std::move(c)) {}
};

GlobalSystem apply_dirichlet(const SparseSymMatrix& A_neumann, const StructuredMesh& mesh,
                             const CoefficientField& coeff, std::vector<int> dirichlet,
                             const std::function<double(double, double)>& g,
                             const Vector& load = Vector());

/// The model boundary value problem: u = 1 - x on the x = 0 and x = 1 edges,
/// natural conditions elsewhere, zero load.
GlobalSystem build_model_problem(const StructuredMesh& mesh, const CoefficientField& coeff);

/// Seminorm |v|^2_{a,D}: per-element quadratic-form sum over the element set.
double energy(const StructuredMesh& mesh, const CoefficientField& coeff,
              std::span<const int> elements, const Vector& v_global);

}  // namespace schwarz
