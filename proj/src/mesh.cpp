// SPDX-License-Identifier: Apache-2.0
#include "schwarz/mesh.hpp"

#include <algorithm>
#include <stdexcept>

namespace schwarz {

StructuredMesh::StructuredMesh(int nx_, int ny_) : nx(nx_), ny(ny_) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("StructuredMesh: nx, ny must be >= 1");
    hx = 1.0 / nx;
    hy = 1.0 / ny;
}

int StructuredMesh::dof_elements(int d, std::array<int, 4>& out) const {
    auto [ix, iy] = dof_xy(d);
    int cnt = 0;
    for (int ey = iy - 1; ey <= iy; ++ey) {
        if (ey < 0 || ey >= ny) continue;
        for (int ex = ix - 1; ex <= ix; ++ex) {
            if (ex < 0 || ex >= nx) continue;
            out[cnt++] = elem_id(ex, ey);
        }
    }
    return cnt;
}

std::vector<int> StructuredMesh::dirichlet_dofs_lr() const {
    std::vector<int> dofs;
    dofs.reserve(2 * (ny + 1));
    for (int iy = 0; iy <= ny; ++iy) {
        dofs.push_back(dof_id(0, iy));
        dofs.push_back(dof_id(nx, iy));
    }
    std::sort(dofs.begin(), dofs.end());
    return dofs;
}

std::vector<int> StructuredMesh::boundary_dofs() const {
    std::vector<int> dofs;
    for (int iy = 0; iy <= ny; ++iy)
        for (int ix = 0; ix <= nx; ++ix)
            if (ix == 0 || ix == nx || iy == 0 || iy == ny) dofs.push_back(dof_id(ix, iy));
    return dofs;
}

}  // namespace schwarz
