// SPDX-License-Identifier: Apache-2.0
#include "schwarz/preconditioner.hpp"

#include <chrono>
#include <stdexcept>

#include "schwarz/parallel.hpp"

namespace schwarz {

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

SchwarzPreconditioner SchwarzPreconditioner::setup(const GlobalSystem& system,
                                                   const SubdomainLayout& layout,
                                                   std::shared_ptr<const CoarseSpace> coarse,
                                                   const SchwarzOptions& opts) {
    SchwarzPreconditioner M;
    M.n_ = system.mesh.num_dofs();
    M.threads_ = opts.threads;
    M.coarse_ = std::move(coarse);
    const int N = layout.num_subdomains();
    M.subs_.resize(N);

    double t0 = now_seconds();
    parallel_for_index(N, opts.threads, [&](int j) {
        SubdomainSolver& s = M.subs_[j];
        for (int d : layout.subdomains[j].interior_dofs)
            if (!system.is_dirichlet[d]) s.dofs.push_back(d);
        if (s.dofs.empty())
            throw std::runtime_error("SchwarzPreconditioner: subdomain " + std::to_string(j) +
                                     " has no free interior dofs");
        try {
            s.factor = factorize(system.A.submatrix(s.dofs));
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("SchwarzPreconditioner: subdomain " + std::to_string(j) +
                                     " matrix is not SPD (" + e.what() + ")");
        }
    });
    M.t_factor_ = now_seconds() - t0;
    return M;
}

Vector SchwarzPreconditioner::apply_one_level(const Vector& r) const {
    if (r.size() != n_) throw std::invalid_argument("SchwarzPreconditioner: dimension mismatch");
    const int N = static_cast<int>(subs_.size());
    std::vector<Vector> local(static_cast<size_t>(N));
    parallel_for_index(N, threads_, [&](int j) {
        const auto& s = subs_[j];
        Vector b(static_cast<int>(s.dofs.size()));
        for (size_t k = 0; k < s.dofs.size(); ++k) b[static_cast<int>(k)] = r[s.dofs[k]];
        local[j] = s.factor.solve(b);
    });
    Vector y = Vector::Zero(n_);
    for (int j = 0; j < N; ++j)
        for (size_t k = 0; k < subs_[j].dofs.size(); ++k)
            y[subs_[j].dofs[k]] += local[j][static_cast<int>(k)];
    return y;
}

Vector SchwarzPreconditioner::apply_coarse(const Vector& r) const {
    if (r.size() != n_) throw std::invalid_argument("SchwarzPreconditioner: dimension mismatch");
    if (!has_coarse()) return Vector::Zero(n_);
    return coarse_->coarse_solve(r);
}

Vector SchwarzPreconditioner::apply(const Vector& r) const {
    Vector y = apply_one_level(r);
    if (has_coarse()) y += coarse_->coarse_solve(r);
    return y;
}

}  // namespace schwarz
