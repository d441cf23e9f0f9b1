// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "schwarz/krylov.hpp"
#include "schwarz/preconditioner.hpp"

using namespace schwarz;

namespace {

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

    Vector homogeneous_rhs() const {
        Vector lift = Vector::Zero(mesh.num_dofs());
        for (size_t k = 0; k < system.dirichlet.size(); ++k)
            lift[system.dirichlet[k]] = system.dirichlet_values[static_cast<int>(k)];
        return system.f - system.A.apply(lift);
    }
};

std::shared_ptr<const CoarseSpace> make_coarse(const Setup& s, CoarseMode mode, int m) {
    CoarseOptions opts;
    opts.rule = ModeRule::fixed(m);
    return std::make_shared<CoarseSpace>(assemble_coarse(s.system, s.layout, mode, opts));
}

SparseSymMatrix identity_sparse(int n) {
    std::vector<Triplet> ts;
    for (int i = 0; i < n; ++i) ts.push_back({i, i, 1.0});
    return SparseSymMatrix::from_triplets(n, ts);
}

}  // namespace

TEST_CASE("single subdomain without coarse space is a direct solve") {
    Setup s(8, 1, 1, 1, 1);
    SchwarzPreconditioner M = SchwarzPreconditioner::setup(s.system, s.layout, nullptr);
    Vector f = s.homogeneous_rhs();
    Vector x_direct = factorize(s.system.A).solve(f);
    Vector x_applied = M.apply(f);
    // identical on the free dofs (the preconditioner keeps Dirichlet at zero)
    for (int d = 0; d < s.mesh.num_dofs(); ++d)
        if (!s.system.is_dirichlet[d])
            CHECK(x_applied[d] == doctest::Approx(x_direct[d]).epsilon(1e-11));

    auto [x, rep] = pcg(s.system.A, [&](const Vector& r) { return M.apply(r); }, f);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
}

TEST_CASE("setup is deterministic") {
    Setup s(16, 2, 2, 1, 1);
    auto coarse = make_coarse(s, CoarseMode::geneo, 3);
    SchwarzPreconditioner M1 = SchwarzPreconditioner::setup(s.system, s.layout, coarse);
    SchwarzPreconditioner M2 = SchwarzPreconditioner::setup(s.system, s.layout, coarse);
    auto gen = oracles::rng(2);
    Vector r = oracles::random_vector(s.mesh.num_dofs(), gen);
    for (int d : s.system.dirichlet) r[d] = 0.0;
    CHECK((M1.apply(r) - M2.apply(r)).norm() == 0.0);
}

TEST_CASE("worker pool size does not change results") {
    Setup s(16, 2, 2, 1, 1, CoefficientKind::channels, 1e3, 4);
    CoarseOptions copts;
    copts.rule = ModeRule::fixed(3);
    CoarseSpace c1 = assemble_coarse(s.system, s.layout, CoarseMode::rgeneo, copts);
    copts.threads = 3;
    CoarseSpace c3 = assemble_coarse(s.system, s.layout, CoarseMode::rgeneo, copts);
    REQUIRE(c1.dim() == c3.dim());
    CHECK((c1.A_H - c3.A_H).norm() == 0.0);

    SchwarzOptions one, three;
    three.threads = 3;
    auto coarse = std::make_shared<CoarseSpace>(std::move(c1));
    SchwarzPreconditioner M1 = SchwarzPreconditioner::setup(s.system, s.layout, coarse, one);
    SchwarzPreconditioner M3 = SchwarzPreconditioner::setup(s.system, s.layout, coarse, three);
    auto gen = oracles::rng(6);
    Vector r = oracles::random_vector(s.mesh.num_dofs(), gen);
    for (int d : s.system.dirichlet) r[d] = 0.0;
    CHECK((M1.apply(r) - M3.apply(r)).norm() == 0.0);
}

TEST_CASE("every subdomain matrix factorizes (SPD restriction)") {
    Setup s(16, 2, 2, 2, 1);
    for (int j = 0; j < s.layout.num_subdomains(); ++j) {
        std::vector<int> free_interior;
        for (int d : s.layout.subdomains[j].interior_dofs)
            if (!s.system.is_dirichlet[d]) free_interior.push_back(d);
        CHECK_NOTHROW((void)factorize(s.system.A.submatrix(free_interior)));
    }
}

TEST_CASE("apply is symmetric and positive") {
    Setup s(16, 2, 2, 1, 1, CoefficientKind::inclusions, 1e3, 9);
    auto coarse = make_coarse(s, CoarseMode::rgeneo, 3);
    SchwarzPreconditioner M = SchwarzPreconditioner::setup(s.system, s.layout, coarse);
    auto gen = oracles::rng(5);
    for (int t = 0; t < 10; ++t) {
        Vector r = oracles::random_vector(s.mesh.num_dofs(), gen);
        Vector q = oracles::random_vector(s.mesh.num_dofs(), gen);
        for (int d : s.system.dirichlet) r[d] = q[d] = 0.0;
        double lhs = q.dot(M.apply(r));
        double rhs = r.dot(M.apply(q));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        CHECK(r.dot(M.apply(r)) > 0.0);
    }
}

TEST_CASE("two-level apply is the sum of the one-level and coarse terms") {
    Setup s(16, 2, 2, 1, 1);
    auto coarse = make_coarse(s, CoarseMode::geneo, 2);
    SchwarzPreconditioner M = SchwarzPreconditioner::setup(s.system, s.layout, coarse);
    auto gen = oracles::rng(8);
    Vector r = oracles::random_vector(s.mesh.num_dofs(), gen);
    for (int d : s.system.dirichlet) r[d] = 0.0;
    Vector total = M.apply(r);
    Vector split = M.apply_one_level(r) + M.apply_coarse(r);
    CHECK((total - split).norm() == 0.0);
    // Dirichlet entries of the result are zero
    for (int d : s.system.dirichlet) CHECK(total[d] == 0.0);
    Vector bad = Vector::Zero(s.mesh.num_dofs() + 1);
    CHECK_THROWS_AS((void)M.apply(bad), std::invalid_argument);
}

TEST_CASE("apply matches the explicitly assembled dense inverse") {
    Setup s(16, 2, 2, 2, 1);
    auto coarse = make_coarse(s, CoarseMode::geneo, 3);
    SchwarzPreconditioner M = SchwarzPreconditioner::setup(s.system, s.layout, coarse);

    const int n = s.mesh.num_dofs();
    DenseMatrix Minv = DenseMatrix::Zero(n, n);
    DenseMatrix Ad = s.system.A.to_dense();
    for (int j = 0; j < s.layout.num_subdomains(); ++j) {
        std::vector<int> dofs;
        for (int d : s.layout.subdomains[j].interior_dofs)
            if (!s.system.is_dirichlet[d]) dofs.push_back(d);
        DenseMatrix Aj(dofs.size(), dofs.size());
        for (size_t a = 0; a < dofs.size(); ++a)
            for (size_t b = 0; b < dofs.size(); ++b) Aj(a, b) = Ad(dofs[a], dofs[b]);
        DenseMatrix Ajinv = Aj.inverse();
        for (size_t a = 0; a < dofs.size(); ++a)
            for (size_t b = 0; b < dofs.size(); ++b) Minv(dofs[a], dofs[b]) += Ajinv(a, b);
    }
    DenseMatrix B(n, coarse->dim());
    for (int i = 0; i < coarse->dim(); ++i)
        B.col(i) = coarse->prolong(Vector::Unit(coarse->dim(), i), n);
    DenseMatrix AH = B.transpose() * Ad * B;
    Minv += B * AH.inverse() * B.transpose();

    auto gen = oracles::rng(12);
    for (int t = 0; t < 5; ++t) {
        Vector r = oracles::random_vector(n, gen);
        for (int d : s.system.dirichlet) r[d] = 0.0;
        Vector ref = Minv * r;
        CHECK((M.apply(r) - ref).norm() <= 1e-12 * ref.norm());
    }
}

TEST_CASE("pcg: identity and finite termination") {
    SparseSymMatrix I = identity_sparse(5);
    auto gen = oracles::rng(3);
    Vector f = oracles::random_vector(5, gen);
    auto [x, rep] = pcg(I, [](const Vector& r) { return r; }, f);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK((x - f).norm() <= 1e-14 * f.norm());

    SparseSymMatrix D =
        SparseSymMatrix::from_triplets(3, {{0, 0, 1.0}, {1, 1, 2.0}, {2, 2, 3.0}});
    Vector f3 = oracles::random_vector(3, gen);
    auto [x3, rep3] = pcg(D, [](const Vector& r) { return r; }, f3);
    CHECK(rep3.converged);
    CHECK(rep3.iterations <= 3);
}

TEST_CASE("pcg matches the direct solve through a one-level preconditioner") {
    Setup s(16, 2, 2, 2, 1);
    SchwarzPreconditioner M = SchwarzPreconditioner::setup(s.system, s.layout, nullptr);
    Vector f = s.homogeneous_rhs();
    PcgOptions opts;
    opts.tol = 1e-10;
    auto [x, rep] = pcg(s.system.A, [&](const Vector& r) { return M.apply(r); }, f, opts);
    CHECK(rep.converged);
    Vector x_ref = factorize(s.system.A).solve(f);
    CHECK((x - x_ref).norm() <= 10 * opts.tol * x_ref.norm());
    CHECK(rep.final_true_relative_residual <= opts.tol * 1.01);
}

TEST_CASE("pcg breakdown on an indefinite operator") {
    SparseSymMatrix D =
        SparseSymMatrix::from_triplets(2, {{0, 0, 1.0}, {1, 1, -1.0}});
    Vector f(2);
    f << 0, 1;
    CHECK_THROWS_WITH_AS((void)pcg(D, [](const Vector& r) { return r; }, f),
                         doctest::Contains("positive definite"), std::runtime_error);
}

TEST_CASE("lanczos estimate: two-step diagonal case is exact") {
    SparseSymMatrix D = SparseSymMatrix::from_triplets(2, {{0, 0, 1.0}, {1, 1, 4.0}});
    Vector f(2);
    f << 1, 1;
    auto [x, rep] = pcg(D, [](const Vector& r) { return r; }, f);
    CHECK(rep.iterations == 2);
    CHECK(rep.kappa == doctest::Approx(4.0).epsilon(1e-10));

    // A = c I: a single eigenvalue, kappa = 1.
    SparseSymMatrix C = SparseSymMatrix::from_triplets(3, {{0, 0, 2.}, {1, 1, 2.}, {2, 2, 2.}});
    Vector f3(3);
    f3 << 1, 2, 3;
    auto [x3, rep3] = pcg(C, [](const Vector& r) { return r; }, f3);
    CHECK(rep3.kappa == doctest::Approx(1.0));

    ConditionEstimate none = lanczos_condition_estimate({0.5}, {});
    CHECK(none.kappa == 1.0);
}

TEST_CASE("ritz values sit inside the preconditioned spectrum") {
    Setup s(12, 2, 2, 1, 1);
    auto coarse = make_coarse(s, CoarseMode::geneo, 2);
    SchwarzPreconditioner M = SchwarzPreconditioner::setup(s.system, s.layout, coarse);
    Vector f = s.homogeneous_rhs();
    auto [x, rep] = pcg(s.system.A, [&](const Vector& r) { return M.apply(r); }, f);
    REQUIRE(rep.converged);

    // Dense spectrum of M^{-1} A on the free dofs.
    std::vector<int> free;
    for (int d = 0; d < s.mesh.num_dofs(); ++d)
        if (!s.system.is_dirichlet[d]) free.push_back(d);
    const int nf = static_cast<int>(free.size());
    DenseMatrix Ad = s.system.A.to_dense();
    DenseMatrix Af(nf, nf), Minv(nf, nf);
    for (int a = 0; a < nf; ++a) {
        Vector e = Vector::Zero(s.mesh.num_dofs());
        e[free[a]] = 1.0;
        Vector me = M.apply(e);
        for (int b = 0; b < nf; ++b) {
            Af(b, a) = Ad(free[b], free[a]);
            Minv(b, a) = me[free[b]];
        }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> es(Af, Minv.inverse());
    double lmin = es.eigenvalues()[0], lmax = es.eigenvalues()[nf - 1];
    CHECK(rep.ritz_min >= lmin - 1e-8 * lmax);
    CHECK(rep.ritz_max <= lmax * (1 + 1e-8));
    CHECK(rep.ritz_min > 0.0);
}

TEST_CASE("pcg error is monotone in the A-norm and stopping is deterministic") {
    Setup s(12, 2, 2, 1, 1);
    SchwarzPreconditioner M = SchwarzPreconditioner::setup(s.system, s.layout, nullptr);
    Vector f = s.homogeneous_rhs();
    PcgOptions opts;
    opts.record_iterates = true;
    auto [x, rep] = pcg(s.system.A, [&](const Vector& r) { return M.apply(r); }, f, opts);
    REQUIRE(rep.converged);
    Vector x_ref = factorize(s.system.A).solve(f);
    double prev = std::numeric_limits<double>::infinity();
    for (const Vector& xk : rep.iterates) {
        Vector err = xk - x_ref;
        double anorm = s.system.A.quad_form(err);
        CHECK(anorm <= prev * (1 + 1e-10) + 1e-30);
        prev = anorm;
    }

    PcgOptions twice = opts;
    twice.record_iterates = false;
    twice.maxit = opts.maxit * 2;
    auto [x2, rep2] = pcg(s.system.A, [&](const Vector& r) { return M.apply(r); }, f, twice);
    CHECK((x2 - x).norm() <= 1e-12 * std::max(1.0, x.norm()));
}
