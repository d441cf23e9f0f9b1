// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "schwarz/mesh.hpp"
#include "schwarz/sparse.hpp"

namespace schwarz {

/// Index sets and weights of one overlapping subdomain. All element/dof lists
/// are sorted ascending in global numbering.
struct Subdomain {
    std::vector<int> elements;        // subdomain elements
    std::vector<int> dofs;            // dofs incident to the subdomain
    std::vector<int> interior_dofs;   // dofs whose every incident element is owned
    std::vector<int> overlap_elements;    // elements shared with another subdomain
    std::vector<int> core_elements;       // elements outside the overlap closure
    std::vector<int> strip_elements;      // overlap plus inward layers
    std::vector<int> strip_layer;         // parallel to strip_elements; 0 = overlap
    std::vector<int> inner_core_elements; // elements beyond the strip
    std::vector<int> overlap_closure_dofs;  // dofs incident to overlap elements
    std::vector<int> core_dofs;             // dofs incident to core elements
    std::vector<int> strip_dofs;            // dofs incident to strip elements
    std::vector<int> core_interface;   // dofs shared by overlap and core elements
    std::vector<int> strip_interface;  // dofs shared by strip and inner-core elements
    Vector xi;   // partition-of-unity weights, aligned with `dofs`
    Vector eta;  // strip weights, aligned with `strip_dofs`
};

struct SubdomainLayout {
    int px = 1, py = 1;
    int overlap_layers = 1;
    int star_layers = 1;
    int delta_layers = 1;  // layer distance between the two strip interfaces
    int k0 = 1;
    std::vector<Subdomain> subdomains;

    int num_subdomains() const { return static_cast<int>(subdomains.size()); }
};

/// Builds the overlapping decomposition: px-by-py non-overlapping blocks
/// extended by `overlap_layers` element layers, overlap zones from element
/// membership counts, strips extended inward by `star_layers` layers, all
/// interface dof sets, and both weight families. Throws on indivisible
/// partitions and on degenerate geometry (empty core regions).
SubdomainLayout build_partition(const StructuredMesh& mesh, int px, int py, int overlap_layers,
                                int star_layers, std::span<const int> dirichlet_dofs);

/// Maximum number of subdomains an element belongs to.
int compute_k0(const StructuredMesh& mesh, const SubdomainLayout& layout);

/// Fills xi: interior-membership count weights, zero on internal subdomain
/// boundaries and on Dirichlet dofs; sums to one at every free dof.
void build_pou(const StructuredMesh& mesh, SubdomainLayout& layout,
               std::span<const int> dirichlet_dofs);

/// Fills eta: equals xi on the overlap closure, zero on the inner strip
/// interface, linear layer-distance ramp in between.
void build_eta(const StructuredMesh& mesh, SubdomainLayout& layout,
               std::span<const int> dirichlet_dofs);

void write_layout_json(const SubdomainLayout& layout, const std::string& path);
SubdomainLayout read_layout_json(const std::string& path);

}  // namespace schwarz
