// SPDX-License-Identifier: Apache-2.0
#include "schwarz/partition.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "schwarz/assembly.hpp"

namespace schwarz {

namespace {

bool contains(const std::vector<int>& sorted, int v) {
    return std::binary_search(sorted.begin(), sorted.end(), v);
}

// Dofs incident to at least one element of each class.
std::vector<int> interface_dofs(const StructuredMesh& mesh, const std::vector<char>& class_a,
                                const std::vector<char>& class_b) {
    std::vector<int> out;
    for (int d = 0; d < mesh.num_dofs(); ++d) {
        std::array<int, 4> elems{};
        int cnt = mesh.dof_elements(d, elems);
        bool a = false, b = false;
        for (int k = 0; k < cnt; ++k) {
            a = a || class_a[elems[k]];
            b = b || class_b[elems[k]];
        }
        if (a && b) out.push_back(d);
    }
    return out;
}

}  // namespace

SubdomainLayout build_partition(const StructuredMesh& mesh, int px, int py, int overlap_layers,
                                int star_layers, std::span<const int> dirichlet_dofs) {
    if (px < 1 || py < 1) throw std::invalid_argument("build_partition: px, py must be >= 1");
    if (mesh.nx % px != 0 || mesh.ny % py != 0)
        throw std::invalid_argument("build_partition: mesh not divisible by the subdomain grid");
    if (overlap_layers < 1 || star_layers < 1)
        throw std::invalid_argument("build_partition: overlap_layers and star_layers must be >= 1");

    const int N = px * py;
    const int bw = mesh.nx / px, bh = mesh.ny / py;
    SubdomainLayout layout;
    layout.px = px;
    layout.py = py;
    layout.overlap_layers = overlap_layers;
    layout.star_layers = star_layers;
    layout.delta_layers = star_layers;
    layout.subdomains.resize(N);

    // Subdomain rectangles: block extended by overlap_layers, clipped.
    std::vector<std::array<int, 4>> rect(N);  // x0, x1, y0, y1 (element ranges)
    for (int by = 0; by < py; ++by) {
        for (int bx = 0; bx < px; ++bx) {
            int j = by * px + bx;
            rect[j] = {std::max(0, bx * bw - overlap_layers),
                       std::min(mesh.nx, (bx + 1) * bw + overlap_layers),
                       std::max(0, by * bh - overlap_layers),
                       std::min(mesh.ny, (by + 1) * bh + overlap_layers)};
        }
    }

    std::vector<int> counts(static_cast<size_t>(mesh.num_elements()), 0);
    for (int j = 0; j < N; ++j)
        for (int ey = rect[j][2]; ey < rect[j][3]; ++ey)
            for (int ex = rect[j][0]; ex < rect[j][1]; ++ex) ++counts[mesh.elem_id(ex, ey)];
    layout.k0 = *std::max_element(counts.begin(), counts.end());

    std::vector<char> in_overlap(static_cast<size_t>(mesh.num_elements()), 0);
    std::vector<char> in_core(static_cast<size_t>(mesh.num_elements()), 0);
    std::vector<char> in_strip(static_cast<size_t>(mesh.num_elements()), 0);
    std::vector<char> in_inner(static_cast<size_t>(mesh.num_elements()), 0);
    std::vector<int> layer(static_cast<size_t>(mesh.num_elements()), -1);

    for (int j = 0; j < N; ++j) {
        Subdomain& sd = layout.subdomains[j];
        const auto [x0, x1, y0, y1] = rect[j];
        for (int ey = y0; ey < y1; ++ey)
            for (int ex = x0; ex < x1; ++ex) sd.elements.push_back(mesh.elem_id(ex, ey));
        std::sort(sd.elements.begin(), sd.elements.end());

        for (int e : sd.elements) {
            if (counts[e] >= 2) {
                sd.overlap_elements.push_back(e);
                in_overlap[e] = 1;
                layer[e] = 0;
            } else {
                sd.core_elements.push_back(e);
                in_core[e] = 1;
            }
        }
        if (N > 1 && sd.core_elements.empty())
            throw std::runtime_error("build_partition: subdomain " + std::to_string(j) +
                                     " has no interior core (degenerate geometry)");

        // Grow the strip inward by star_layers element layers (vertex adjacency).
        std::vector<int> frontier = sd.overlap_elements;
        for (int lvl = 1; lvl <= star_layers && !frontier.empty(); ++lvl) {
            std::vector<int> next;
            for (int e : frontier) {
                auto [ex, ey] = mesh.elem_xy(e);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        int nxp = ex + dx, nyp = ey + dy;
                        if (nxp < x0 || nxp >= x1 || nyp < y0 || nyp >= y1) continue;
                        int ne = mesh.elem_id(nxp, nyp);
                        if (layer[ne] >= 0) continue;
                        layer[ne] = lvl;
                        next.push_back(ne);
                    }
                }
            }
            frontier = std::move(next);
        }
        for (int e : sd.elements) {
            if (layer[e] >= 0) {
                sd.strip_elements.push_back(e);
                in_strip[e] = 1;
            } else {
                sd.inner_core_elements.push_back(e);
                in_inner[e] = 1;
            }
        }
        for (int e : sd.strip_elements) sd.strip_layer.push_back(layer[e]);

        sd.dofs = dofs_of_elements(mesh, sd.elements);
        if (!sd.overlap_elements.empty())
            sd.overlap_closure_dofs = dofs_of_elements(mesh, sd.overlap_elements);
        if (!sd.core_elements.empty()) sd.core_dofs = dofs_of_elements(mesh, sd.core_elements);
        if (!sd.strip_elements.empty()) sd.strip_dofs = dofs_of_elements(mesh, sd.strip_elements);
        sd.core_interface = interface_dofs(mesh, in_overlap, in_core);
        sd.strip_interface = interface_dofs(mesh, in_strip, in_inner);

        // Interior dofs: every incident element lies inside the subdomain rect.
        for (int d : sd.dofs) {
            std::array<int, 4> elems{};
            int cnt = mesh.dof_elements(d, elems);
            bool all_in = true;
            for (int k = 0; k < cnt; ++k) {
                auto [ex, ey] = mesh.elem_xy(elems[k]);
                if (ex < x0 || ex >= x1 || ey < y0 || ey >= y1) all_in = false;
            }
            if (all_in) sd.interior_dofs.push_back(d);
        }

        for (int e : sd.elements) {
            in_overlap[e] = in_core[e] = in_strip[e] = in_inner[e] = 0;
            layer[e] = -1;
        }
    }

    build_pou(mesh, layout, dirichlet_dofs);
    build_eta(mesh, layout, dirichlet_dofs);
    return layout;
}

int compute_k0(const StructuredMesh& mesh, const SubdomainLayout& layout) {
    std::vector<int> counts(static_cast<size_t>(mesh.num_elements()), 0);
    for (const auto& sd : layout.subdomains)
        for (int e : sd.elements) ++counts[e];
    return *std::max_element(counts.begin(), counts.end());
}

void build_pou(const StructuredMesh& mesh, SubdomainLayout& layout,
               std::span<const int> dirichlet_dofs) {
    std::vector<char> dir(static_cast<size_t>(mesh.num_dofs()), 0);
    for (int d : dirichlet_dofs) dir[d] = 1;

    std::vector<int> interior_count(static_cast<size_t>(mesh.num_dofs()), 0);
    for (const auto& sd : layout.subdomains)
        for (int d : sd.interior_dofs) ++interior_count[d];
    for (int d = 0; d < mesh.num_dofs(); ++d)
        if (interior_count[d] == 0 && !dir[d])
            throw std::runtime_error("build_pou: dof " + std::to_string(d) +
                                     " is interior to no subdomain");

    for (auto& sd : layout.subdomains) {
        sd.xi = Vector::Zero(static_cast<int>(sd.dofs.size()));
        std::vector<char> interior(static_cast<size_t>(mesh.num_dofs()), 0);
        for (int d : sd.interior_dofs) interior[d] = 1;
        for (size_t i = 0; i < sd.dofs.size(); ++i) {
            int d = sd.dofs[i];
            if (dir[d] || !interior[d]) continue;
            sd.xi[static_cast<int>(i)] = 1.0 / interior_count[d];
        }
    }
}

void build_eta(const StructuredMesh& mesh, SubdomainLayout& layout,
               std::span<const int> dirichlet_dofs) {
    std::vector<char> dir(static_cast<size_t>(mesh.num_dofs()), 0);
    for (int d : dirichlet_dofs) dir[d] = 1;
    const double s = layout.star_layers;

    for (auto& sd : layout.subdomains) {
        sd.eta = Vector::Zero(static_cast<int>(sd.strip_dofs.size()));
        if (sd.strip_dofs.empty()) continue;
        std::vector<int> strip_layer_of(static_cast<size_t>(mesh.num_elements()), -1);
        for (size_t k = 0; k < sd.strip_elements.size(); ++k)
            strip_layer_of[sd.strip_elements[k]] = sd.strip_layer[k];

        for (size_t i = 0; i < sd.strip_dofs.size(); ++i) {
            int d = sd.strip_dofs[i];
            if (dir[d]) continue;
            if (contains(sd.overlap_closure_dofs, d)) {
                auto it = std::lower_bound(sd.dofs.begin(), sd.dofs.end(), d);
                sd.eta[static_cast<int>(i)] = sd.xi[static_cast<int>(it - sd.dofs.begin())];
                continue;
            }
            if (contains(sd.strip_interface, d)) continue;  // eta = 0
            std::array<int, 4> elems{};
            int cnt = mesh.dof_elements(d, elems);
            int kmin = -1;
            for (int k = 0; k < cnt; ++k) {
                int lvl = strip_layer_of[elems[k]];
                if (lvl < 0)
                    throw std::runtime_error("build_eta: unclassified strip dof " + std::to_string(d));
                if (kmin < 0 || lvl < kmin) kmin = lvl;
            }
            sd.eta[static_cast<int>(i)] = (s - kmin) / s;
        }
    }
}

void write_layout_json(const SubdomainLayout& layout, const std::string& path) {
    nlohmann::json j;
    j["px"] = layout.px;
    j["py"] = layout.py;
    j["overlap_layers"] = layout.overlap_layers;
    j["star_layers"] = layout.star_layers;
    j["delta_layers"] = layout.delta_layers;
    j["k0"] = layout.k0;
    j["subdomains"] = nlohmann::json::array();
    for (const auto& sd : layout.subdomains) {
        nlohmann::json js;
        js["elements"] = sd.elements;
        js["dofs"] = sd.dofs;
        js["interior_dofs"] = sd.interior_dofs;
        js["overlap_elements"] = sd.overlap_elements;
        js["core_elements"] = sd.core_elements;
        js["strip_elements"] = sd.strip_elements;
        js["strip_layer"] = sd.strip_layer;
        js["inner_core_elements"] = sd.inner_core_elements;
        js["overlap_closure_dofs"] = sd.overlap_closure_dofs;
        js["core_dofs"] = sd.core_dofs;
        js["strip_dofs"] = sd.strip_dofs;
        js["core_interface"] = sd.core_interface;
        js["strip_interface"] = sd.strip_interface;
        js["xi"] = std::vector<double>(sd.xi.data(), sd.xi.data() + sd.xi.size());
        js["eta"] = std::vector<double>(sd.eta.data(), sd.eta.data() + sd.eta.size());
        j["subdomains"].push_back(std::move(js));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(1) << "\n";
}

SubdomainLayout read_layout_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    nlohmann::json j;
    in >> j;
    SubdomainLayout layout;
    layout.px = j.at("px");
    layout.py = j.at("py");
    layout.overlap_layers = j.at("overlap_layers");
    layout.star_layers = j.at("star_layers");
    layout.delta_layers = j.at("delta_layers");
    layout.k0 = j.at("k0");
    for (const auto& js : j.at("subdomains")) {
        Subdomain sd;
        sd.elements = js.at("elements").get<std::vector<int>>();
        sd.dofs = js.at("dofs").get<std::vector<int>>();
        sd.interior_dofs = js.at("interior_dofs").get<std::vector<int>>();
        sd.overlap_elements = js.at("overlap_elements").get<std::vector<int>>();
        sd.core_elements = js.at("core_elements").get<std::vector<int>>();
        sd.strip_elements = js.at("strip_elements").get<std::vector<int>>();
        sd.strip_layer = js.at("strip_layer").get<std::vector<int>>();
        sd.inner_core_elements = js.at("inner_core_elements").get<std::vector<int>>();
        sd.overlap_closure_dofs = js.at("overlap_closure_dofs").get<std::vector<int>>();
        sd.core_dofs = js.at("core_dofs").get<std::vector<int>>();
        sd.strip_dofs = js.at("strip_dofs").get<std::vector<int>>();
        sd.core_interface = js.at("core_interface").get<std::vector<int>>();
        sd.strip_interface = js.at("strip_interface").get<std::vector<int>>();
        auto xi = js.at("xi").get<std::vector<double>>();
        auto eta = js.at("eta").get<std::vector<double>>();
        sd.xi = Eigen::Map<const Vector>(xi.data(), static_cast<int>(xi.size()));
        sd.eta = Eigen::Map<const Vector>(eta.data(), static_cast<int>(eta.size()));
        layout.subdomains.push_back(std::move(sd));
    }
    return layout;
}

}  // namespace schwarz
