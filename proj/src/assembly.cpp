// SPDX-License-Identifier: Apache-2.0
#include "schwarz/assembly.hpp"

#include <algorithm>
#include <stdexcept>

namespace schwarz {

ElementMatrix element_stiffness(double alpha, double hx, double hy) {
    if (alpha <= 0.0 || hx <= 0.0 || hy <= 0.0)
        throw std::invalid_argument("element_stiffness: inputs must be positive");
    // K = alpha * ((hy/hx) Kxx + (hx/hy) Kyy), exact for constant alpha.
    static const double kxx[4][4] = {{2, -2, -1, 1}, {-2, 2, 1, -1}, {-1, 1, 2, -2}, {1, -1, -2, 2}};
    static const double kyy[4][4] = {{2, 1, -1, -2}, {1, 2, -2, -1}, {-1, -2, 2, 1}, {-2, -1, 1, 2}};
    ElementMatrix em;
    double cx = alpha * hy / (6.0 * hx);
    double cy = alpha * hx / (6.0 * hy);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) em.k(i, j) = cx * kxx[i][j] + cy * kyy[i][j];
    return em;
}

namespace {

void scatter_elements(const StructuredMesh& mesh, const CoefficientField& coeff,
                      std::span<const int> elements, const std::vector<int>& global_to_local,
                      std::vector<Triplet>& ts) {
    for (int e : elements) {
        ElementMatrix em = element_stiffness(coeff.alpha[e], mesh.hx, mesh.hy);
        auto dofs = mesh.elem_dofs(e);
        for (int a = 0; a < 4; ++a) {
            int i = global_to_local.empty() ? dofs[a] : global_to_local[dofs[a]];
            for (int b = a; b < 4; ++b) {
                int j = global_to_local.empty() ? dofs[b] : global_to_local[dofs[b]];
                ts.push_back({i, j, em.k(a, b)});
            }
        }
    }
}

}  // namespace

SparseSymMatrix assemble(const StructuredMesh& mesh, const CoefficientField& coeff) {
    if (static_cast<int>(coeff.alpha.size()) != mesh.num_elements())
        throw std::invalid_argument("assemble: coefficient size mismatch");
    std::vector<Triplet> ts;
    ts.reserve(static_cast<size_t>(mesh.num_elements()) * 10);
    std::vector<int> all(static_cast<size_t>(mesh.num_elements()));
    for (int e = 0; e < mesh.num_elements(); ++e) all[e] = e;
    scatter_elements(mesh, coeff, all, {}, ts);
    return SparseSymMatrix::from_triplets(mesh.num_dofs(), std::move(ts));
}

std::vector<int> dofs_of_elements(const StructuredMesh& mesh, std::span<const int> elements) {
    std::vector<int> dofs;
    dofs.reserve(elements.size() * 4);
    for (int e : elements)
        for (int d : mesh.elem_dofs(e)) dofs.push_back(d);
    std::sort(dofs.begin(), dofs.end());
    dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
    return dofs;
}

LocalMatrix sub_assemble(const StructuredMesh& mesh, const CoefficientField& coeff,
                         std::span<const int> elements) {
    if (elements.empty()) throw std::invalid_argument("sub_assemble: empty element set");
    if (static_cast<int>(coeff.alpha.size()) != mesh.num_elements())
        throw std::invalid_argument("sub_assemble: coefficient size mismatch");
    LocalMatrix lm;
    lm.dofs = dofs_of_elements(mesh, elements);
    std::vector<int> g2l(static_cast<size_t>(mesh.num_dofs()), -1);
    for (size_t l = 0; l < lm.dofs.size(); ++l) g2l[lm.dofs[l]] = static_cast<int>(l);
    std::vector<Triplet> ts;
    ts.reserve(elements.size() * 10);
    scatter_elements(mesh, coeff, elements, g2l, ts);
    lm.A = SparseSymMatrix::from_triplets(static_cast<int>(lm.dofs.size()), std::move(ts));
    return lm;
}

GlobalSystem apply_dirichlet(const SparseSymMatrix& A_neumann, const StructuredMesh& mesh,
                             const CoefficientField& coeff, std::vector<int> dirichlet,
                             const std::function<double(double, double)>& g, const Vector& load) {
    if (dirichlet.empty()) throw std::invalid_argument("apply_dirichlet: empty Dirichlet set");
    std::sort(dirichlet.begin(), dirichlet.end());
    dirichlet.erase(std::unique(dirichlet.begin(), dirichlet.end()), dirichlet.end());
    const int n = mesh.num_dofs();
    if (A_neumann.rows() != n) throw std::invalid_argument("apply_dirichlet: size mismatch");

    GlobalSystem sys(mesh, coeff);
    sys.A_neumann = A_neumann;
    sys.dirichlet = std::move(dirichlet);
    sys.is_dirichlet.assign(static_cast<size_t>(n), 0);
    sys.dirichlet_values = Vector::Zero(static_cast<int>(sys.dirichlet.size()));
    Vector u_g = Vector::Zero(n);
    for (size_t k = 0; k < sys.dirichlet.size(); ++k) {
        int d = sys.dirichlet[k];
        sys.is_dirichlet[d] = 1;
        auto [x, y] = mesh.dof_coords(d);
        sys.dirichlet_values[static_cast<int>(k)] = g(x, y);
        u_g[d] = sys.dirichlet_values[static_cast<int>(k)];
    }

    sys.f = (load.size() == 0) ? Vector::Zero(n) : Vector(load);
    if (sys.f.size() != n) throw std::invalid_argument("apply_dirichlet: load size mismatch");
    Vector coupling = A_neumann.apply(u_g);
    for (int i = 0; i < n; ++i) {
        if (sys.is_dirichlet[i])
            sys.f[i] = u_g[i];
        else
            sys.f[i] -= coupling[i];
    }
    sys.A = A_neumann.with_dirichlet_rows(sys.dirichlet);
    return sys;
}

GlobalSystem build_model_problem(const StructuredMesh& mesh, const CoefficientField& coeff) {
    SparseSymMatrix A = assemble(mesh, coeff);
    return apply_dirichlet(A, mesh, coeff, mesh.dirichlet_dofs_lr(),
                           [](double x, double) { return 1.0 - x; });
}

double energy(const StructuredMesh& mesh, const CoefficientField& coeff,
              std::span<const int> elements, const Vector& v_global) {
    if (v_global.size() != mesh.num_dofs()) throw std::invalid_argument("energy: size mismatch");
    double s = 0.0;
    for (int e : elements) {
        ElementMatrix em = element_stiffness(coeff.alpha[e], mesh.hx, mesh.hy);
        auto dofs = mesh.elem_dofs(e);
        Eigen::Vector4d v;
        for (int a = 0; a < 4; ++a) v[a] = v_global[dofs[a]];
        s += v.dot(em.k * v);
    }
    return s;
}

}  // namespace schwarz
