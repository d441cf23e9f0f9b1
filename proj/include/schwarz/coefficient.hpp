// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "schwarz/mesh.hpp"

namespace schwarz {

enum class CoefficientKind { constant, channels, inclusions, islands };

CoefficientKind parse_coefficient_kind(const std::string& name);
std::string to_string(CoefficientKind kind);

/// Per-element diffusion coefficient with generator provenance. Background
/// elements carry the value 1, feature elements the requested contrast, so
/// max/min equals the contrast exactly (1 for a constant field).
struct CoefficientField {
    std::vector<double> alpha;  // one value per element
    CoefficientKind kind = CoefficientKind::constant;
    double contrast = 1.0;
    unsigned long seed = 0;

    double min() const;
    double max() const;
};

/// Deterministic field given (kind, contrast, seed, mesh).
///   channels:   horizontal full-width stripes (cross vertical subdomain cuts)
///   inclusions: random axis-aligned rectangles
///   islands:    random disc-shaped blobs
CoefficientField gen_coefficient(CoefficientKind kind, double contrast, unsigned long seed,
                                 const StructuredMesh& mesh);
CoefficientField gen_coefficient(const std::string& kind, double contrast, unsigned long seed,
                                 const StructuredMesh& mesh);

/// CSV rows "ex,ey,value", nx*ny rows, no header.
void write_coefficient_csv(const CoefficientField& c, const StructuredMesh& mesh,
                           const std::string& path);
CoefficientField read_coefficient_csv(const StructuredMesh& mesh, const std::string& path);

/// Log-scale grayscale PGM image, one pixel per element.
void write_coefficient_pgm(const CoefficientField& c, const StructuredMesh& mesh,
                           const std::string& path);

}  // namespace schwarz
