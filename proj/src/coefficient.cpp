// SPDX-License-Identifier: Apache-2.0
#include "schwarz/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace schwarz {

CoefficientKind parse_coefficient_kind(const std::string& name) {
    if (name == "constant") return CoefficientKind::constant;
    if (name == "channels") return CoefficientKind::channels;
    if (name == "inclusions") return CoefficientKind::inclusions;
    if (name == "islands") return CoefficientKind::islands;
    throw std::invalid_argument("unknown coefficient kind: " + name);
}

std::string to_string(CoefficientKind kind) {
    switch (kind) {
        case CoefficientKind::constant: return "constant";
        case CoefficientKind::channels: return "channels";
        case CoefficientKind::inclusions: return "inclusions";
        case CoefficientKind::islands: return "islands";
    }
    return "?";
}

double CoefficientField::min() const { return *std::min_element(alpha.begin(), alpha.end()); }
double CoefficientField::max() const { return *std::max_element(alpha.begin(), alpha.end()); }

namespace {

// Paints `alpha` with feature value `hi`, keeping at least one background and
// one feature element so max/min matches the contrast exactly.
void finalize(std::vector<double>& alpha, double hi) {
    bool any_bg = false, any_hi = false;
    for (double a : alpha) {
        if (a == 1.0) any_bg = true;
        else any_hi = true;
    }
    if (!any_hi) alpha.front() = hi;
    if (!any_bg) alpha.back() = 1.0;
}

}  // namespace

CoefficientField gen_coefficient(CoefficientKind kind, double contrast, unsigned long seed,
                                 const StructuredMesh& mesh) {
    if (contrast < 1.0) throw std::invalid_argument("gen_coefficient: contrast must be >= 1");
    CoefficientField c;
    c.kind = kind;
    c.contrast = contrast;
    c.seed = seed;
    c.alpha.assign(static_cast<size_t>(mesh.num_elements()), 1.0);
    if (kind == CoefficientKind::constant || contrast == 1.0) return c;

    std::mt19937_64 rng(seed);
    const int nx = mesh.nx, ny = mesh.ny;
    const double hi = contrast;

    switch (kind) {
        case CoefficientKind::channels: {
            int n_channels = std::clamp(ny / 8, 3, 12);
            int max_thick = std::max(1, ny / 32);
            std::vector<char> painted(static_cast<size_t>(ny), 0);
            for (int cidx = 0; cidx < n_channels; ++cidx) {
                int y0 = static_cast<int>(rng() % static_cast<unsigned long>(ny));
                int t = 1 + static_cast<int>(rng() % static_cast<unsigned long>(max_thick));
                for (int y = y0; y < std::min(y0 + t, ny); ++y) {
                    // keep at least one background row
                    int total = 0;
                    for (char p : painted) total += p;
                    if (total >= ny - 1) break;
                    if (painted[y]) continue;
                    painted[y] = 1;
                    for (int x = 0; x < nx; ++x) c.alpha[mesh.elem_id(x, y)] = hi;
                }
            }
            break;
        }
        case CoefficientKind::inclusions: {
            int k = std::max(4, nx * ny / 512);
            int max_w = std::max(1, nx / 8), max_h = std::max(1, ny / 8);
            for (int r = 0; r < k; ++r) {
                int w = 1 + static_cast<int>(rng() % static_cast<unsigned long>(max_w));
                int h = 1 + static_cast<int>(rng() % static_cast<unsigned long>(max_h));
                int x0 = static_cast<int>(rng() % static_cast<unsigned long>(std::max(1, nx - w + 1)));
                int y0 = static_cast<int>(rng() % static_cast<unsigned long>(std::max(1, ny - h + 1)));
                for (int y = y0; y < std::min(y0 + h, ny); ++y)
                    for (int x = x0; x < std::min(x0 + w, nx); ++x)
                        c.alpha[mesh.elem_id(x, y)] = hi;
            }
            break;
        }
        case CoefficientKind::islands: {
            int k = std::max(3, nx * ny / 1024);
            std::uniform_real_distribution<double> ux(0.0, nx), uy(0.0, ny);
            std::uniform_real_distribution<double> ur(1.0, std::max(2.0, std::min(nx, ny) / 8.0));
            for (int b = 0; b < k; ++b) {
                double cx = ux(rng), cy = uy(rng), r = ur(rng);
                int x0 = std::max(0, static_cast<int>(cx - r) - 1);
                int x1 = std::min(nx, static_cast<int>(cx + r) + 2);
                int y0 = std::max(0, static_cast<int>(cy - r) - 1);
                int y1 = std::min(ny, static_cast<int>(cy + r) + 2);
                for (int y = y0; y < y1; ++y)
                    for (int x = x0; x < x1; ++x) {
                        double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
                        if (dx * dx + dy * dy <= r * r) c.alpha[mesh.elem_id(x, y)] = hi;
                    }
            }
            break;
        }
        case CoefficientKind::constant: break;
    }
    finalize(c.alpha, hi);
    return c;
}

CoefficientField gen_coefficient(const std::string& kind, double contrast, unsigned long seed,
                                 const StructuredMesh& mesh) {
    return gen_coefficient(parse_coefficient_kind(kind), contrast, seed, mesh);
}

void write_coefficient_csv(const CoefficientField& c, const StructuredMesh& mesh,
                           const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    for (int ey = 0; ey < mesh.ny; ++ey)
        for (int ex = 0; ex < mesh.nx; ++ex)
            out << ex << "," << ey << "," << c.alpha[mesh.elem_id(ex, ey)] << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

CoefficientField read_coefficient_csv(const StructuredMesh& mesh, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    CoefficientField c;
    c.alpha.assign(static_cast<size_t>(mesh.num_elements()), 0.0);
    std::string line;
    int count = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        int ex = 0, ey = 0;
        char comma = 0;
        double v = 0.0;
        if (!(ls >> ex >> comma >> ey >> comma >> v))
            throw std::runtime_error("bad coefficient CSV line: " + line);
        c.alpha[mesh.elem_id(ex, ey)] = v;
        ++count;
    }
    if (count != mesh.num_elements())
        throw std::runtime_error("coefficient CSV row count mismatch in " + path);
    return c;
}

void write_coefficient_pgm(const CoefficientField& c, const StructuredMesh& mesh,
                           const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    double lo = c.min(), hi = c.max();
    double span = (hi > lo) ? std::log(hi / lo) : 1.0;
    out << "P2\n" << mesh.nx << " " << mesh.ny << "\n255\n";
    for (int ey = mesh.ny - 1; ey >= 0; --ey) {
        for (int ex = 0; ex < mesh.nx; ++ex) {
            int g = static_cast<int>(std::lround(255.0 * std::log(c.alpha[mesh.elem_id(ex, ey)] / lo) / span));
            out << std::clamp(g, 0, 255) << (ex + 1 == mesh.nx ? "" : " ");
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace schwarz
