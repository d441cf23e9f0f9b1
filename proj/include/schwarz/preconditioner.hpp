// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <vector>

#include "schwarz/assembly.hpp"
#include "schwarz/coarse.hpp"
#include "schwarz/factorization.hpp"
#include "schwarz/partition.hpp"

namespace schwarz {

struct SchwarzOptions {
    int threads = 1;
};

/// Two-level additive Schwarz preconditioner: the sum of subdomain solves on
/// the interior-dof restrictions plus an optional coarse solve. Immutable
/// after setup; apply is safe to call concurrently.
class SchwarzPreconditioner {
public:
    static SchwarzPreconditioner setup(const GlobalSystem& system, const SubdomainLayout& layout,
                                       std::shared_ptr<const CoarseSpace> coarse,
                                       const SchwarzOptions& opts = {});

    /// Sum of the coarse term and all subdomain terms. Dirichlet entries of
    /// the input must be zero; the output vanishes there.
    Vector apply(const Vector& r) const;

    /// One-level part (subdomain solves only).
    Vector apply_one_level(const Vector& r) const;

    /// Coarse term alone (zero without a coarse space).
    Vector apply_coarse(const Vector& r) const;

    int rows() const { return n_; }
    bool has_coarse() const { return coarse_ && !coarse_->empty(); }
    double setup_seconds() const { return t_factor_; }

private:
    struct SubdomainSolver {
        std::vector<int> dofs;  // free interior dofs of the subdomain
        Factorization factor;
    };
    std::vector<SubdomainSolver> subs_;
    std::shared_ptr<const CoarseSpace> coarse_;
    int n_ = 0;
    int threads_ = 1;
    double t_factor_ = 0.0;
};

}  // namespace schwarz
