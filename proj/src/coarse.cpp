// SPDX-License-Identifier: Apache-2.0
#include "schwarz/coarse.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "schwarz/parallel.hpp"

namespace schwarz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZeroEig = 1e-10;  // eigenvalues at or below are the zero class

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::vector<int> local_dirichlet(const GlobalSystem& system, const std::vector<int>& dofs) {
    std::vector<int> out;
    for (size_t i = 0; i < dofs.size(); ++i)
        if (system.is_dirichlet[dofs[i]]) out.push_back(static_cast<int>(i));
    return out;
}

int position_of(const std::vector<int>& sorted, int value) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), value);
    if (it == sorted.end() || *it != value)
        throw std::logic_error("position_of: value not in index set");
    return static_cast<int>(it - sorted.begin());
}

}  // namespace

std::string to_string(CoarseMode mode) { return mode == CoarseMode::geneo ? "geneo" : "rgeneo"; }

ModeRule ModeRule::fixed(int m) {
    ModeRule r;
    r.kind = Kind::fixed;
    r.m = m;
    return r;
}

ModeRule ModeRule::threshold(double tau) {
    ModeRule r;
    r.kind = Kind::threshold;
    r.tau = tau;
    return r;
}

LocalEigenProblem build_geneo_pencil(const GlobalSystem& system, const SubdomainLayout& layout,
                                     int j) {
    const Subdomain& sd = layout.subdomains[j];
    if (sd.overlap_elements.empty())
        throw std::runtime_error("build_geneo_pencil: subdomain " + std::to_string(j) +
                                 " has an empty overlap zone");
    LocalEigenProblem p;
    p.subdomain = j;
    p.mode = CoarseMode::geneo;
    LocalMatrix lm = sub_assemble(system.mesh, system.coeff, sd.elements);
    p.dofs = lm.dofs;
    std::vector<int> dir = local_dirichlet(system, p.dofs);
    p.left = lm.A.with_dirichlet_rows(dir);

    // Overlap energy padded to the subdomain dofs, then weighted by xi
    // (zero on Dirichlet dofs, so they end up as zero rows on the right).
    LocalMatrix ov = sub_assemble(system.mesh, system.coeff, sd.overlap_elements);
    std::vector<Triplet> ts;
    ts.reserve(ov.A.values().size());
    for (int i = 0; i < ov.A.rows(); ++i)
        for (int k = ov.A.row_ptr()[i]; k < ov.A.row_ptr()[i + 1]; ++k)
            ts.push_back({position_of(p.dofs, ov.dofs[i]),
                          position_of(p.dofs, ov.dofs[ov.A.col_idx()[k]]), ov.A.values()[k]});
    SparseSymMatrix padded =
        SparseSymMatrix::from_triplets(static_cast<int>(p.dofs.size()), std::move(ts));
    p.weights = sd.xi;
    p.right = padded.diag_scaled(p.weights);
    return p;
}

LocalEigenProblem build_rgeneo_pencil(const GlobalSystem& system, const SubdomainLayout& layout,
                                      int j) {
    const Subdomain& sd = layout.subdomains[j];
    if (sd.overlap_elements.empty())
        throw std::runtime_error("build_rgeneo_pencil: subdomain " + std::to_string(j) +
                                 " has an empty overlap zone");
    if (sd.inner_core_elements.empty() || sd.strip_interface.empty())
        throw std::runtime_error("build_rgeneo_pencil: subdomain " + std::to_string(j) +
                                 " has degenerate strip geometry");
    LocalEigenProblem p;
    p.subdomain = j;
    p.mode = CoarseMode::rgeneo;
    LocalMatrix lm = sub_assemble(system.mesh, system.coeff, sd.strip_elements);
    p.dofs = lm.dofs;
    std::vector<int> dir = local_dirichlet(system, p.dofs);
    p.left = lm.A.with_dirichlet_rows(dir);
    p.weights = sd.eta;
    p.right = lm.A.diag_scaled(p.weights);
    return p;
}

HarmonicExtender::HarmonicExtender(const GlobalSystem& system, const SubdomainLayout& layout,
                                   int j) {
    const Subdomain& sd = layout.subdomains[j];
    if (sd.core_elements.empty())
        throw std::runtime_error("HarmonicExtender: subdomain " + std::to_string(j) +
                                 " has an empty core");
    core_ = sub_assemble(system.mesh, system.coeff, sd.core_elements);
    constrained_.assign(core_.dofs.size(), 0);
    trace_to_core_.reserve(sd.core_interface.size());
    for (int d : sd.core_interface) {
        int pos = position_of(core_.dofs, d);
        trace_to_core_.push_back(pos);
        constrained_[pos] = 1;
    }
    for (size_t i = 0; i < core_.dofs.size(); ++i)
        if (system.is_dirichlet[core_.dofs[i]]) constrained_[i] = 1;
    std::vector<int> clist;
    for (size_t i = 0; i < constrained_.size(); ++i)
        if (constrained_[i]) clist.push_back(static_cast<int>(i));
    solver_ = factorize(core_.A.with_dirichlet_rows(clist));
}

Vector HarmonicExtender::extend(const Vector& trace) const {
    if (trace.size() != static_cast<int>(trace_to_core_.size()))
        throw std::invalid_argument("harmonic_extension: trace size mismatch");
    const int n = static_cast<int>(core_.dofs.size());
    Vector lift = Vector::Zero(n);
    for (int k = 0; k < trace.size(); ++k) lift[trace_to_core_[k]] = trace[k];
    Vector rhs = -core_.A.apply(lift);
    for (int i = 0; i < n; ++i)
        if (constrained_[i]) rhs[i] = lift[i];
    return solver_.solve(rhs);
}

Vector harmonic_extension(const GlobalSystem& system, const SubdomainLayout& layout, int j,
                          const Vector& trace) {
    return HarmonicExtender(system, layout, j).extend(trace);
}

ModeSelection select_modes(const std::vector<double>& values, bool finite_exhausted,
                           const ModeRule& rule) {
    if (values.empty() && finite_exhausted)
        throw std::runtime_error("select_modes: every eigenvalue is infinite");
    ModeSelection sel;
    const int len = static_cast<int>(values.size());
    if (rule.kind == ModeRule::Kind::fixed) {
        sel.m_j = std::min(rule.m, len);
    } else {
        sel.m_j = static_cast<int>(
            std::count_if(values.begin(), values.end(), [&](double v) { return v < rule.tau; }));
    }
    while (sel.m_j < len && values[sel.m_j] <= kZeroEig) {
        ++sel.m_j;
        sel.shifted_past_zero = true;
    }
    if (sel.m_j < len)
        sel.lambda_next = values[sel.m_j];
    else
        sel.lambda_next = finite_exhausted ? kInf : std::numeric_limits<double>::quiet_NaN();
    return sel;
}

namespace {

// Unweighted coarse vector on the subdomain dofs: the eigenvector itself
// (geneo) or the eigenvector on the overlap closure completed by the
// harmonic extension of its interface trace (rgeneo). The two branches agree
// on the interface by construction.
Vector compose_unweighted(CoarseMode mode, const SubdomainLayout& layout, int j,
                          const Vector& t_local, const HarmonicExtender* extender) {
    const Subdomain& sd = layout.subdomains[j];
    if (mode == CoarseMode::geneo) {
        if (t_local.size() != static_cast<int>(sd.dofs.size()))
            throw std::invalid_argument("build_coarse_vector: local vector size mismatch");
        return t_local;
    }
    if (t_local.size() != static_cast<int>(sd.strip_dofs.size()))
        throw std::invalid_argument("build_coarse_vector: strip vector size mismatch");
    Vector trace(static_cast<int>(sd.core_interface.size()));
    for (size_t k = 0; k < sd.core_interface.size(); ++k)
        trace[static_cast<int>(k)] = t_local[position_of(sd.strip_dofs, sd.core_interface[k])];
    Vector interior = extender->extend(trace);
    Vector y(static_cast<int>(sd.dofs.size()));
    for (size_t i = 0; i < sd.dofs.size(); ++i) {
        int d = sd.dofs[i];
        if (std::binary_search(sd.overlap_closure_dofs.begin(), sd.overlap_closure_dofs.end(), d))
            y[static_cast<int>(i)] = t_local[position_of(sd.strip_dofs, d)];
        else
            y[static_cast<int>(i)] = interior[position_of(extender->core_dofs(), d)];
    }
    return y;
}

}  // namespace

Vector build_coarse_vector(CoarseMode mode, const GlobalSystem& system,
                           const SubdomainLayout& layout, int j, const Vector& t_local,
                           const HarmonicExtender* extender) {
    const Subdomain& sd = layout.subdomains[j];
    std::optional<HarmonicExtender> own;
    if (mode == CoarseMode::rgeneo && !extender) {
        own.emplace(system, layout, j);
        extender = &*own;
    }
    Vector y = compose_unweighted(mode, layout, j, t_local, extender);
    Vector g = Vector::Zero(system.mesh.num_dofs());
    for (size_t i = 0; i < sd.dofs.size(); ++i)
        g[sd.dofs[i]] = sd.xi[static_cast<int>(i)] * y[static_cast<int>(i)];
    return g;
}

std::vector<int> filter_spd_columns(DenseMatrix S, double rel_tol) {
    const int n = static_cast<int>(S.rows());
    std::vector<int> piv(static_cast<size_t>(n));
    std::iota(piv.begin(), piv.end(), 0);
    double max_diag = 0.0;
    for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, S(i, i));
    int r = 0;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (S(i, i) > S(p, p)) p = i;
        if (!(S(p, p) > rel_tol * max_diag) || !std::isfinite(S(p, p))) break;
        if (p != k) {
            S.row(k).swap(S.row(p));
            S.col(k).swap(S.col(p));
            std::swap(piv[k], piv[p]);
        }
        double d = S(k, k);
        for (int i = k + 1; i < n; ++i)
            for (int l = i; l < n; ++l) {
                double upd = S(i, l) - S(k, i) * S(k, l) / d;
                S(i, l) = upd;
                S(l, i) = upd;
            }
        r = k + 1;
    }
    std::vector<int> kept(piv.begin(), piv.begin() + r);
    std::sort(kept.begin(), kept.end());
    return kept;
}

Vector CoarseSpace::restrict_to_coarse(const Vector& r) const {
    Vector y(dim());
    for (int i = 0; i < dim(); ++i) {
        const auto& sup = supports[basis[i].subdomain];
        double s = 0.0;
        for (size_t k = 0; k < sup.size(); ++k) s += basis[i].local[static_cast<int>(k)] * r[sup[k]];
        y[i] = s;
    }
    return y;
}

Vector CoarseSpace::prolong(const Vector& y, int n) const {
    Vector g = Vector::Zero(n);
    for (int i = 0; i < dim(); ++i) {
        const auto& sup = supports[basis[i].subdomain];
        for (size_t k = 0; k < sup.size(); ++k) g[sup[k]] += y[i] * basis[i].local[static_cast<int>(k)];
    }
    return g;
}

Vector CoarseSpace::coarse_solve(const Vector& r) const {
    if (empty()) return Vector::Zero(r.size());
    return prolong(A_H_factor.solve(restrict_to_coarse(r)), static_cast<int>(r.size()));
}

CoarseSpace assemble_coarse(const GlobalSystem& system, const SubdomainLayout& layout,
                            CoarseMode mode, const CoarseOptions& opts) {
    const int N = layout.num_subdomains();
    CoarseSpace cs;
    cs.mode = mode;
    cs.supports.resize(N);
    cs.eigenvalues.resize(N);
    cs.m_per_subdomain.assign(N, 0);
    cs.lambda_next.assign(N, kInf);
    if (opts.keep_analysis_data) cs.analysis.resize(N);
    for (int j = 0; j < N; ++j) cs.supports[j] = layout.subdomains[j].dofs;

    struct PerSubdomain {
        std::vector<Vector> basis;
        std::vector<double> eigenvalues;
        int m_j = 0;
        double lambda_next = kInf;
    };
    std::vector<PerSubdomain> results(N);

    double t0 = now_seconds();
    parallel_for_index(N, opts.threads, [&](int j) {
        const Subdomain& sd = layout.subdomains[j];
        if (sd.overlap_elements.empty()) return;  // no neighbours: nothing to contribute

        LocalEigenProblem pencil = (mode == CoarseMode::geneo)
                                       ? build_geneo_pencil(system, layout, j)
                                       : build_rgeneo_pencil(system, layout, j);
        const int dim = pencil.left.rows();
        GenEigOptions eig = opts.eig;
        eig.seed = opts.eig.seed + static_cast<unsigned long>(j) + 1;

        int request = (opts.rule.kind == ModeRule::Kind::fixed) ? opts.rule.m + 1 : 8;
        EigenPairs pairs;
        ModeSelection sel;
        for (;;) {
            request = std::min(request, dim);
            pairs = gen_sym_eig(pencil.left, pencil.right, request, eig);
            bool threshold_uncovered = opts.rule.kind == ModeRule::Kind::threshold &&
                                       !pairs.finite_exhausted && request < dim &&
                                       (pairs.values.empty() || pairs.values.back() < opts.rule.tau);
            if (threshold_uncovered) {
                request *= 2;
                continue;
            }
            sel = select_modes(pairs.values, pairs.finite_exhausted, opts.rule);
            if (std::isnan(sel.lambda_next) && request < dim) {
                request = std::max(request * 2, sel.m_j + 2);
                continue;
            }
            break;
        }
        if (std::isnan(sel.lambda_next)) sel.lambda_next = kInf;

        std::optional<HarmonicExtender> ext;
        if (mode == CoarseMode::rgeneo) ext.emplace(system, layout, j);

        PerSubdomain& res = results[j];
        res.eigenvalues = pairs.values;
        res.m_j = sel.m_j;
        res.lambda_next = sel.lambda_next;
        DenseMatrix y(static_cast<int>(sd.dofs.size()), sel.m_j);
        for (int k = 0; k < sel.m_j; ++k) {
            y.col(k) = compose_unweighted(mode, layout, j, pairs.vectors.col(k),
                                          ext ? &*ext : nullptr);
            Vector local(static_cast<int>(sd.dofs.size()));
            for (size_t i = 0; i < sd.dofs.size(); ++i)
                local[static_cast<int>(i)] = sd.xi[static_cast<int>(i)] * y(static_cast<int>(i), k);
            res.basis.push_back(std::move(local));
        }
        if (opts.keep_analysis_data)
            cs.analysis[j] = SubdomainSpectralData{std::move(pencil), pairs, y};
    });
    cs.t_eigen = now_seconds() - t0;

    t0 = now_seconds();
    for (int j = 0; j < N; ++j) {
        cs.eigenvalues[j] = results[j].eigenvalues;
        cs.m_per_subdomain[j] = results[j].m_j;
        cs.lambda_next[j] = results[j].lambda_next;
        for (auto& v : results[j].basis) cs.basis.push_back({j, std::move(v)});
    }
    cs.dim_before_filter = cs.dim();
    if (cs.empty()) {
        cs.t_assembly = now_seconds() - t0;
        return cs;
    }

    // Galerkin coarse matrix A_H = B^T A B over the (j, k)-ordered basis.
    const int M = cs.dim();
    const int n = system.mesh.num_dofs();
    DenseMatrix AH = DenseMatrix::Zero(M, M);
    Vector scattered = Vector::Zero(n);
    for (int i = 0; i < M; ++i) {
        const auto& sup_i = cs.supports[cs.basis[i].subdomain];
        for (size_t k = 0; k < sup_i.size(); ++k)
            scattered[sup_i[k]] = cs.basis[i].local[static_cast<int>(k)];
        Vector z = system.A.apply(scattered);
        for (size_t k = 0; k < sup_i.size(); ++k) scattered[sup_i[k]] = 0.0;
        for (int l = 0; l <= i; ++l) {
            const auto& sup_l = cs.supports[cs.basis[l].subdomain];
            double s = 0.0;
            for (size_t k = 0; k < sup_l.size(); ++k)
                s += cs.basis[l].local[static_cast<int>(k)] * z[sup_l[k]];
            AH(i, l) = s;
            AH(l, i) = s;
        }
    }

    std::vector<int> kept = filter_spd_columns(AH, opts.drop_tol);
    if (static_cast<int>(kept.size()) < M) {
        std::vector<char> keep_flag(static_cast<size_t>(M), 0);
        for (int k : kept) keep_flag[k] = 1;
        for (int i = 0; i < M; ++i)
            if (!keep_flag[i]) cs.dropped_columns.push_back(i);
        DenseMatrix AH2(kept.size(), kept.size());
        for (size_t a = 0; a < kept.size(); ++a)
            for (size_t b = 0; b < kept.size(); ++b) AH2(a, b) = AH(kept[a], kept[b]);
        std::vector<CoarseSpace::BasisVector> kept_basis;
        kept_basis.reserve(kept.size());
        for (int k : kept) kept_basis.push_back(std::move(cs.basis[k]));
        cs.basis = std::move(kept_basis);
        AH = std::move(AH2);
    }
    cs.A_H = AH;
    cs.A_H_factor.compute(cs.A_H);
    if (cs.A_H_factor.info() != Eigen::Success)
        throw std::runtime_error("assemble_coarse: coarse matrix factorization failed");
    cs.t_assembly = now_seconds() - t0;
    return cs;
}

void write_eigenvalue_csv(const CoarseSpace& coarse, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    out << "subdomain,k,lambda,retained\n";
    for (size_t j = 0; j < coarse.eigenvalues.size(); ++j)
        for (size_t k = 0; k < coarse.eigenvalues[j].size(); ++k)
            out << j << "," << k + 1 << "," << coarse.eigenvalues[j][k] << ","
                << (static_cast<int>(k) < coarse.m_per_subdomain[j] ? 1 : 0) << "\n";
}

void dump_pencils(const GlobalSystem& system, const SubdomainLayout& layout,
                  const CoarseSpace& coarse, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (int j = 0; j < layout.num_subdomains(); ++j) {
        if (layout.subdomains[j].overlap_elements.empty()) continue;
        LocalEigenProblem p = (coarse.mode == CoarseMode::geneo)
                                  ? build_geneo_pencil(system, layout, j)
                                  : build_rgeneo_pencil(system, layout, j);
        std::string stem = dir + "/pencil_" + to_string(coarse.mode) + "_" + std::to_string(j);
        write_matrix_market(p.left, stem + "_left.mtx");
        write_matrix_market(p.right, stem + "_right.mtx");
    }
    write_eigenvalue_csv(coarse, dir + "/eigenvalues_" + to_string(coarse.mode) + ".csv");
}

}  // namespace schwarz
