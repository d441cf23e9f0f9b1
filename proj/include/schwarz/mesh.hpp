// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <utility>
#include <vector>

namespace schwarz {

/// Structured quadrilateral mesh of the unit square with bilinear elements.
/// Dofs are numbered lexicographically, x fastest. Element (ex, ey) has the
/// counterclockwise corner dofs (ex,ey), (ex+1,ey), (ex+1,ey+1), (ex,ey+1).
struct StructuredMesh {
    int nx = 0;
    int ny = 0;
    double hx = 0.0;
    double hy = 0.0;

    StructuredMesh(int nx_, int ny_);

    int num_elements() const { return nx * ny; }
    int num_dofs() const { return (nx + 1) * (ny + 1); }

    int elem_id(int ex, int ey) const { return ey * nx + ex; }
    std::pair<int, int> elem_xy(int e) const { return {e % nx, e / nx}; }

    int dof_id(int ix, int iy) const { return iy * (nx + 1) + ix; }
    std::pair<int, int> dof_xy(int d) const { return {d % (nx + 1), d / (nx + 1)}; }
    std::pair<double, double> dof_coords(int d) const {
        auto [ix, iy] = dof_xy(d);
        return {ix * hx, iy * hy};
    }

    std::array<int, 4> elem_dofs(int e) const {
        auto [ex, ey] = elem_xy(e);
        int d0 = dof_id(ex, ey);
        return {d0, d0 + 1, d0 + nx + 2, d0 + nx + 1};
    }

    /// Elements incident to a dof (up to four); returns the count.
    int dof_elements(int d, std::array<int, 4>& out) const;

    /// Dofs on the x = 0 and x = 1 lines (the model problem's Dirichlet set).
    std::vector<int> dirichlet_dofs_lr() const;

    /// All dofs on the boundary of the unit square.
    std::vector<int> boundary_dofs() const;
};

}  // namespace schwarz
