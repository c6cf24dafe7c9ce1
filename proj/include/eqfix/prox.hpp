#pragma once

#include "eqfix/bifunction.hpp"
#include "eqfix/geometry.hpp"

namespace eqfix {

/// min over y in `set` of  rho f(anchor_f, y) + 1/2 |y - anchor_prox|^2.
/// 1-strongly convex in y whenever f(anchor_f, .) is convex.
struct ProxSubproblem {
    const Bifunction& f;
    const ConvexSet& set;
    Vector anchor_f;
    Vector anchor_prox;
    double rho = 1.0;
};

struct ProxOptions {
    double tol = 1e-10;
    std::size_t max_iters = 5000;
    bool fast_path = true;  // single projection for affine-in-y bifunctions
    ProjectionTolerances projection;
};

/// Gradient of the subproblem objective at y.
Vector prox_gradient(const ProxSubproblem& p, const Vector& y);

/// Fixed-point residual |y - P_C(y - g(y))| certifying optimality.
double prox_residual(const ProxSubproblem& p, const Vector& y, const ProjectionTolerances& tol = {});

/// Unique minimizer of the subproblem. VI bifunctions take the closed form
/// P_C(anchor_prox - rho F(anchor_f)); the general path is projected
/// gradient with step 1 / (1 + rho * curvature), stopped on the fixed-point
/// residual. Throws InnerNoConvergence after max_iters.
Vector solve_prox(const ProxSubproblem& p, const ProxOptions& options = {});

}  // namespace eqfix
