// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "oracles.hpp"
#include "schwarz/bench.hpp"
#include "schwarz/theory.hpp"

using namespace schwarz;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Setup {
    StructuredMesh mesh;
    CoefficientField coeff;
    GlobalSystem system;
    SubdomainLayout layout;

    Setup(int n, int px, int py, int ell, int s, CoefficientKind kind = CoefficientKind::constant,
          double contrast = 1.0, unsigned long seed = 1)
        : mesh(n, n),
          coeff(gen_coefficient(kind, contrast, seed, mesh)),
          system(build_model_problem(mesh, coeff)),
          layout(build_partition(mesh, px, py, ell, s, system.dirichlet)) {}
};

CoarseSpace coarse_with_data(const Setup& s, CoarseMode mode, int m) {
    CoarseOptions opts;
    opts.rule = ModeRule::fixed(m);
    opts.keep_analysis_data = true;
    return assemble_coarse(s.system, s.layout, mode, opts);
}

}  // namespace

TEST_CASE("projector reproduces retained modes and kills the complement") {
    Setup s(18, 3, 3, 1, 1, CoefficientKind::inclusions, 1e3, 3);
    CoarseSpace cs = coarse_with_data(s, CoarseMode::rgeneo, 4);
    for (int j : {0, 4}) {
        const auto& data = cs.analysis[j];
        int m_j = cs.m_per_subdomain[j];
        REQUIRE(m_j >= 1);
        double lam = cs.lambda_next[j];

        Vector t1 = data.pairs.vectors.col(0);
        auto [pt1, d1] = local_projection(data.pencil, data.pairs, m_j, lam, t1);
        CHECK((pt1 - t1).norm() <= 1e-8 * t1.norm());

        // A vector beyond the retained block is b-orthogonal to it.
        if (static_cast<int>(data.pairs.values.size()) > m_j) {
            Vector tn = data.pairs.vectors.col(m_j);
            auto [ptn, dn] = local_projection(data.pencil, data.pairs, m_j, lam, tn);
            CHECK(ptn.norm() <= 1e-8 * tn.norm());
        }
    }
}

TEST_CASE("projection defects stay within the stability estimates") {
    for (CoarseMode mode : {CoarseMode::geneo, CoarseMode::rgeneo}) {
        Setup s(16, 2, 2, 2, 1, CoefficientKind::channels, 1e4, 5);
        CoarseSpace cs = coarse_with_data(s, mode, 4);
        auto gen = oracles::rng(77);
        for (int j = 0; j < s.layout.num_subdomains(); ++j) {
            const auto& data = cs.analysis[j];
            int m_j = cs.m_per_subdomain[j];
            double lam = cs.lambda_next[j];
            REQUIRE(lam > 0.0);
            for (int t = 0; t < 20; ++t) {
                Vector v(static_cast<int>(data.pencil.dofs.size()));
                for (int i = 0; i < v.size(); ++i)
                    v[i] = s.system.is_dirichlet[data.pencil.dofs[i]] ? 0.0
                                                                      : oracles::random_vector(1, gen)[0];
                auto [pv, d] = local_projection(data.pencil, data.pairs, m_j, lam, v);
                CHECK(d.orthogonality <= 1e-10);
                CHECK(d.projection_growth <= 1.0 + 1e-10);
                CHECK(d.remainder_growth <= 1.0 + 1e-10);
                CHECK(d.stability_ratio <= 1.0 + 1e-8);
            }
        }
    }
}

TEST_CASE("stable decomposition: zero input, coarse closure, random energy ratios") {
    Setup s(18, 3, 3, 1, 1, CoefficientKind::channels, 1e4, 11);
    CoarseSpace cs = coarse_with_data(s, CoarseMode::rgeneo, 4);

    DecompositionResult zero = stable_decomposition(s.system, s.layout, cs,
                                                    Vector::Zero(s.mesh.num_dofs()));
    CHECK(zero.z0.norm() == 0.0);
    for (const auto& z : zero.z) CHECK(z.norm() == 0.0);

    // u equal to one coarse basis vector reconstructs exactly.
    Vector u = cs.prolong(Vector::Unit(cs.dim(), 0), s.mesh.num_dofs());
    DecompositionResult dec = stable_decomposition(s.system, s.layout, cs, u);
    CHECK(dec.reconstruction_error <= 1e-10);

    double k0 = s.layout.k0;
    double max_term = 0.0;
    for (int j = 0; j < s.layout.num_subdomains(); ++j)
        max_term = std::max(max_term, mode_term(CoarseMode::rgeneo, cs.lambda_next[j]));
    double c0sq = 2.0 + k0 * (2 * k0 + 1) * max_term;

    auto gen = oracles::rng(13);
    for (int t = 0; t < 10; ++t) {
        Vector v(s.mesh.num_dofs());
        for (int i = 0; i < v.size(); ++i)
            v[i] = s.system.is_dirichlet[i] ? 0.0 : oracles::random_vector(1, gen)[0];
        DecompositionResult d = stable_decomposition(s.system, s.layout, cs, v);
        CHECK(d.reconstruction_error <= 1e-10);
        CHECK(d.energy_ratio <= c0sq);
    }
}

TEST_CASE("condition bound formulas") {
    // Synthetic coarse space: lambda = infinity everywhere, k0 = 4:
    // the strip bound reduces to 5 * (2 + 36 * 2) = 370.
    SubdomainLayout layout;
    layout.k0 = 4;
    layout.subdomains.resize(3);
    for (auto& sd : layout.subdomains) sd.overlap_elements = {0};
    CoarseSpace cs;
    cs.mode = CoarseMode::rgeneo;
    cs.lambda_next = {kInf, kInf, kInf};
    cs.eigenvalues.resize(3);
    cs.m_per_subdomain = {1, 1, 1};
    SolveReport rep;
    rep.kappa = 10.0;
    TheoryReport tr = condition_bounds(layout, cs, rep);
    CHECK(tr.bound == doctest::Approx(370.0));
    CHECK(tr.bound_satisfied);

    // geneo variant with finite lambda: 5 * (2 + 36 * (1 + 1/0.5)) = 550.
    cs.mode = CoarseMode::geneo;
    cs.lambda_next = {0.5, kInf, kInf};
    tr = condition_bounds(layout, cs, rep);
    CHECK(tr.bound == doctest::Approx(5.0 * (2.0 + 36.0 * 3.0)));

    // k0 = 1 single-subdomain reduction: bound = 2 * (2 + 3 * term).
    SubdomainLayout single;
    single.k0 = 1;
    single.subdomains.resize(1);
    single.subdomains[0].overlap_elements = {0};
    CoarseSpace one;
    one.mode = CoarseMode::rgeneo;
    one.lambda_next = {1.0};
    one.eigenvalues.resize(1);
    one.m_per_subdomain = {1};
    tr = condition_bounds(single, one, rep);
    CHECK(tr.bound == doctest::Approx(2.0 * (2.0 + 3.0 * (2.0 + 3.0))));
}

TEST_CASE("measured kappa respects the bound on a full run") {
    for (CoarseMode mode : {CoarseMode::geneo, CoarseMode::rgeneo}) {
        Setup s(32, 2, 2, 2, 1, CoefficientKind::channels, 1e6, 7);
        CoarseSpace cs = coarse_with_data(s, mode, 6);
        auto coarse = std::make_shared<CoarseSpace>(cs);
        SchwarzPreconditioner M = SchwarzPreconditioner::setup(s.system, s.layout, coarse);
        Vector lift = Vector::Zero(s.mesh.num_dofs());
        for (size_t k = 0; k < s.system.dirichlet.size(); ++k)
            lift[s.system.dirichlet[k]] = s.system.dirichlet_values[static_cast<int>(k)];
        Vector f = s.system.f - s.system.A.apply(lift);
        auto [x, rep] = pcg(s.system.A, [&](const Vector& r) { return M.apply(r); }, f);
        REQUIRE(rep.converged);
        TheoryReport tr = verify_theory(s.system, s.layout, cs, rep, 5, 4, 99, &M);
        CHECK(tr.bound_satisfied);
        CHECK(tr.kappa_measured <= tr.bound);
        CHECK(tr.max_orthogonality_defect <= 1e-10);
        CHECK(tr.max_stability_ratio <= 1.0 + 1e-8);
        CHECK(tr.max_reconstruction_error <= 1e-10);
        CHECK(tr.decomposition_within_c0);
    }
}

TEST_CASE("bound values never increase with more retained modes") {
    Setup s(16, 2, 2, 2, 1, CoefficientKind::channels, 1e4, 5);
    double prev_bound = kInf;
    for (int m : {2, 4, 8}) {
        CoarseSpace cs = coarse_with_data(s, CoarseMode::rgeneo, m);
        SolveReport rep;
        rep.kappa = 1.0;
        TheoryReport tr = condition_bounds(s.layout, cs, rep);
        CHECK(tr.bound <= prev_bound * (1 + 1e-12));
        prev_bound = tr.bound;
    }
}

TEST_CASE("theory report export") {
    TheoryReport tr;
    tr.mode = "rgeneo";
    tr.k0 = 4;
    tr.lambda_next = {0.5, kInf};
    tr.c0_squared = 100.0;
    tr.bound = 500.0;
    tr.kappa_measured = 12.0;
    tr.bound_satisfied = true;
    std::string path = (std::filesystem::temp_directory_path() / "schwarz_theory_test.json").string();
    write_theory_json(tr, path);
    CHECK(std::filesystem::file_size(path) > 0);
    std::string md = theory_markdown(tr);
    CHECK(md.find("bound") != std::string::npos);
    CHECK(md.find("rgeneo") != std::string::npos);
    std::remove(path.c_str());
}
