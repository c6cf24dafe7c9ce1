#include "eqfix/prox.hpp"

#include "eqfix/errors.hpp"

namespace eqfix {

Vector prox_gradient(const ProxSubproblem& p, const Vector& y) {
    return p.rho * p.f.partial_subgradient(p.anchor_f, y) + (y - p.anchor_prox);
}

double prox_residual(const ProxSubproblem& p, const Vector& y, const ProjectionTolerances& tol) {
    return (y - project(p.set, Vector(y - prox_gradient(p, y)), tol)).norm();
}

Vector solve_prox(const ProxSubproblem& p, const ProxOptions& options) {
    if (!(p.rho > 0.0)) throw ValidationError("params", "prox step rho must be positive");
    if (p.f.dimension() != p.set.dimension())
        throw DimensionMismatch("solve_prox", p.set.dimension(), p.f.dimension());

    if (options.fast_path && p.f.is_vi()) {
        const Vector slope = p.f.partial_subgradient(p.anchor_f, p.anchor_f);
        return project(p.set, Vector(p.anchor_prox - p.rho * slope), options.projection);
    }

    const double step = 1.0 / (1.0 + p.rho * p.f.curvature_bound());
    Vector y = project(p.set, p.anchor_prox, options.projection);
    for (std::size_t it = 0; it < options.max_iters; ++it) {
        const Vector g = prox_gradient(p, y);
        if ((y - project(p.set, Vector(y - g), options.projection)).norm() <= options.tol) return y;
        y = project(p.set, Vector(y - step * g), options.projection);
    }
    if (prox_residual(p, y, options.projection) <= options.tol) return y;
    throw InnerNoConvergence("prox subproblem: residual above " + std::to_string(options.tol) + " after " +
                             std::to_string(options.max_iters) + " projected-gradient steps");
}

}  // namespace eqfix
