// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "schwarz/assembly.hpp"
#include "schwarz/eigensolver.hpp"
#include "schwarz/factorization.hpp"
#include "schwarz/partition.hpp"

namespace schwarz {

enum class CoarseMode { geneo, rgeneo };
std::string to_string(CoarseMode mode);

/// Local generalized eigenproblem of one subdomain: the subdomain (or strip)
/// energy against its partition-of-unity weighted counterpart. Global
/// Dirichlet dofs carry identity rows on the left and zero rows on the right,
/// so they surface as infinite modes.
struct LocalEigenProblem {
    int subdomain = -1;
    CoarseMode mode = CoarseMode::geneo;
    SparseSymMatrix left;
    SparseSymMatrix right;
    std::vector<int> dofs;  // local -> global map (subdomain dofs / strip dofs)
    Vector weights;         // xi or eta, aligned with `dofs`
};

LocalEigenProblem build_geneo_pencil(const GlobalSystem& system, const SubdomainLayout& layout,
                                     int j);
LocalEigenProblem build_rgeneo_pencil(const GlobalSystem& system, const SubdomainLayout& layout,
                                      int j);

/// Energy-minimizing extension from the overlap/core interface into the
/// interior core, with one cached factorization per subdomain reused for all
/// traces. Dofs on the global Dirichlet boundary are pinned to zero.
class HarmonicExtender {
public:
    HarmonicExtender(const GlobalSystem& system, const SubdomainLayout& layout, int j);

    /// `trace` is aligned with the subdomain's core_interface dofs; the
    /// result is aligned with its core_dofs.
    Vector extend(const Vector& trace) const;

    const std::vector<int>& core_dofs() const { return core_.dofs; }
    /// Raw core energy |v|^2 for a vector aligned with core_dofs.
    double core_energy(const Vector& v) const { return core_.A.quad_form(v); }

private:
    LocalMatrix core_;
    Factorization solver_;
    std::vector<char> constrained_;   // local flags: interface or Dirichlet
    std::vector<int> trace_to_core_;  // interface position -> core-local index
};

Vector harmonic_extension(const GlobalSystem& system, const SubdomainLayout& layout, int j,
                          const Vector& trace);

struct ModeRule {
    enum class Kind { fixed, threshold };
    Kind kind = Kind::fixed;
    int m = 12;
    double tau = 0.3;

    static ModeRule fixed(int m);
    static ModeRule threshold(double tau);
};

struct ModeSelection {
    int m_j = 0;
    double lambda_next = 0.0;  // +inf when no further finite pair exists
    bool shifted_past_zero = false;
};

/// Retained-mode count from ascending finite eigenvalues. `finite_exhausted`
/// says the list covers every finite pair, so running past its end means
/// lambda = infinity. Shifts past zero eigenvalues so lambda_{m_j+1} > 0
/// whenever possible.
ModeSelection select_modes(const std::vector<double>& values, bool finite_exhausted,
                           const ModeRule& rule);

/// Lifts a local eigenvector to a global coarse vector: identity on the
/// subdomain (geneo) or interface-trace harmonic extension into the core
/// (rgeneo), then partition-of-unity weighting and extension by zero.
Vector build_coarse_vector(CoarseMode mode, const GlobalSystem& system,
                           const SubdomainLayout& layout, int j, const Vector& t_local,
                           const HarmonicExtender* extender = nullptr);

/// Per-subdomain spectral data retained for the theory checks.
struct SubdomainSpectralData {
    LocalEigenProblem pencil;
    EigenPairs pairs;
    DenseMatrix y;  // columns: unweighted coarse vectors on subdomain dofs
};

struct CoarseSpace {
    CoarseMode mode = CoarseMode::geneo;
    struct BasisVector {
        int subdomain = -1;
        Vector local;  // aligned with the subdomain's dof list
    };
    std::vector<BasisVector> basis;
    std::vector<std::vector<int>> supports;  // per subdomain: its dof list
    int dim_before_filter = 0;
    std::vector<int> dropped_columns;
    DenseMatrix A_H;
    Eigen::LLT<DenseMatrix> A_H_factor;
    std::vector<std::vector<double>> eigenvalues;  // per subdomain, finite, ascending
    std::vector<int> m_per_subdomain;
    std::vector<double> lambda_next;               // lambda_{m_j+1}, +inf allowed
    std::vector<SubdomainSpectralData> analysis;   // optional, see CoarseOptions
    double t_eigen = 0.0;
    double t_assembly = 0.0;

    int dim() const { return static_cast<int>(basis.size()); }
    bool empty() const { return basis.empty(); }

    Vector restrict_to_coarse(const Vector& r) const;
    Vector prolong(const Vector& y, int n) const;
    /// R_H^T A_H^{-1} R_H r.
    Vector coarse_solve(const Vector& r) const;
};

struct CoarseOptions {
    ModeRule rule;
    GenEigOptions eig;
    double drop_tol = 1e-10;  // pivoted-Cholesky relative drop tolerance
    int threads = 1;
    bool keep_analysis_data = false;
};

/// Builds every local pencil, solves for the retained modes, lifts them to
/// global basis vectors, and assembles + factorizes the Galerkin coarse
/// matrix. Subdomains without overlap contribute nothing; an empty coarse
/// space (single subdomain, m = 0) is valid.
CoarseSpace assemble_coarse(const GlobalSystem& system, const SubdomainLayout& layout,
                            CoarseMode mode, const CoarseOptions& opts);

/// Near-dependence filter: full-pivoted Cholesky on an SPD Gram matrix;
/// returns the kept column indices, sorted ascending.
std::vector<int> filter_spd_columns(DenseMatrix S, double rel_tol);

/// Debug dumps: pencils in Matrix Market form, eigenvalues as CSV rows
/// "subdomain,k,lambda,retained".
void dump_pencils(const GlobalSystem& system, const SubdomainLayout& layout,
                  const CoarseSpace& coarse, const std::string& dir);
void write_eigenvalue_csv(const CoarseSpace& coarse, const std::string& path);

}  // namespace schwarz
