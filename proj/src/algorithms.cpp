#include "eqfix/algorithms.hpp"

#include "eqfix/errors.hpp"
#include "eqfix/prox.hpp"
#include "monitor.hpp"

#include <algorithm>
#include <cmath>

namespace eqfix {

std::string_view to_string(Algorithm a) {
    return a == Algorithm::Extragradient ? "extragradient" : "linesearch";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
    if (name == "extragradient") return Algorithm::Extragradient;
    if (name == "linesearch") return Algorithm::Linesearch;
    return std::nullopt;
}

std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::FixedPointAndEquilibrium: return "FixedPointAndEquilibrium";
        case StopReason::IterateChangeSmall: return "IterateChangeSmall";
        case StopReason::MaxIters: return "MaxIters";
    }
    return "unknown";
}

// ── Parameters ──────────────────────────────────────────────────────

Schedule Schedule::constant(double v) {
    return {[v](std::size_t) { return v; }, v, v};
}

SolverParams SolverParams::defaults(Algorithm a, const std::optional<LipschitzConstants>& lipschitz) {
    SolverParams p;
    p.alpha = {[](std::size_t k) { return 1.0 - 1.0 / static_cast<double>(k + 2); }, 0.5, 1.0};
    p.beta = Schedule::constant(0.5);
    p.gamma = Schedule::constant(1.0);
    if (a == Algorithm::Extragradient && lipschitz) {
        p.rho = Schedule::constant(0.9 * std::min(1.0 / (2.0 * lipschitz->L1), 1.0 / (2.0 * lipschitz->L2)));
    } else {
        p.rho = Schedule::constant(1.0);
    }
    return p;
}

void SolverParams::validate(Algorithm a, const std::optional<LipschitzConstants>& lipschitz) const {
    auto fail = [](const std::string& msg) { throw ValidationError("params", msg); };
    if (!rho.at || !alpha.at || !beta.at || (a == Algorithm::Linesearch && !gamma.at))
        fail("every parameter schedule must be set");
    if (!(rho.lo > 0.0) || !(rho.hi >= rho.lo) || !std::isfinite(rho.hi)) fail("rho range must satisfy 0 < lo <= hi");
    if (a == Algorithm::Extragradient) {
        if (!lipschitz) throw ValidationError("A4", "the extragradient method needs Lipschitz-type constants");
        const double cap = std::min(1.0 / (2.0 * lipschitz->L1), 1.0 / (2.0 * lipschitz->L2));
        if (!(rho.hi < cap))
            fail("rho upper bound " + std::to_string(rho.hi) + " must be below min{1/(2 L1), 1/(2 L2)} = " +
                 std::to_string(cap));
    }
    if (!(alpha.lo >= 0.0) || !(alpha.hi <= 1.0) || alpha.lo > alpha.hi) fail("alpha range must lie in [0, 1]");
    if (!(beta.lo >= 0.0) || !(beta.hi < 1.0) || beta.lo > beta.hi) fail("beta range must lie in [0, b] with b < 1");
    if (a == Algorithm::Linesearch) {
        if (!(gamma.lo > 0.0) || !(gamma.hi < 2.0) || gamma.lo > gamma.hi) fail("gamma range must lie in (0, 2)");
        if (!(eta > 0.0 && eta < 1.0)) fail("eta must lie in (0, 1)");
        if (!(mu > 0.0 && mu < 1.0)) fail("mu must lie in (0, 1)");
        if (m_max < 1) fail("m_max must be positive");
    }
    if (!(tol_stop >= 0.0)) fail("tol_stop must be nonnegative");
    if (!(inner_tol > 0.0)) fail("inner tolerance must be positive");

    // Schedules are arbitrary callables; spot-check them against their ranges.
    const std::size_t horizon = std::min<std::size_t>(max_outer_iters, 1000);
    auto in_range = [](const Schedule& s, double v) { return v >= s.lo && v <= s.hi; };
    for (std::size_t k = 0; k < horizon; ++k) {
        if (!in_range(rho, rho(k))) fail("rho_k leaves its declared range at k = " + std::to_string(k));
        if (!in_range(alpha, alpha(k))) fail("alpha_k leaves its declared range at k = " + std::to_string(k));
        if (!in_range(beta, beta(k))) fail("beta_k leaves its declared range at k = " + std::to_string(k));
        if (a == Algorithm::Linesearch && !in_range(gamma, gamma(k)))
            fail("gamma_k leaves its declared range at k = " + std::to_string(k));
    }
}

// ── Hybrid projection step ──────────────────────────────────────────

Halfspace hybrid_cut(const Vector& x, const Vector& u) {
    if (x == u) return Halfspace::whole_space(static_cast<std::size_t>(x.size()));
    // |p - u| <= |p - x|  <=>  <p, 2(x - u)> <= |x|^2 - |u|^2, offset taken at the midpoint.
    Vector normal = 2.0 * (x - u);
    const double offset = normal.dot(0.5 * (x + u));
    return {std::move(normal), offset};
}

Halfspace anchor_cut(const Vector& x, const Vector& anchor) {
    if (x == anchor) return Halfspace::whole_space(static_cast<std::size_t>(x.size()));
    Vector normal = anchor - x;
    const double offset = normal.dot(x);
    return {std::move(normal), offset};
}

Vector hybrid_projection(const Halfspace& Ck, const Halfspace& Qk, const ConvexSet& C, const Vector& anchor,
                         const ProjectionTolerances& tol) {
    const Halfspace cuts[] = {Ck, Qk};
    try {
        return project_with_cuts(C, cuts, anchor, tol);
    } catch (const NoConvergence& e) {
        throw EmptyIntersection(std::string("Ck ∩ Qk ∩ C: ") + e.what());
    }
}

namespace {

ProxOptions prox_options(const SolverParams& p) {
    ProxOptions o;
    o.tol = p.inner_tol;
    o.max_iters = p.max_inner_iters;
    o.projection = p.projection;
    return o;
}

void finish_iterate(IterateState& s, const Vector& mapped_point, const ProblemInstance& problem,
                    const SolverParams& params) {
    s.t = s.alpha * s.x + (1.0 - s.alpha) * problem.T.apply(s.x);
    s.u = s.beta * s.t + (1.0 - s.beta) * problem.T.apply(mapped_point);
    s.Ck = hybrid_cut(s.x, s.u);
    s.Qk = anchor_cut(s.x, problem.start);
    s.x_next = hybrid_projection(s.Ck, s.Qk, problem.set, problem.start, params.projection);
}

}  // namespace

// ── Extragradient method ────────────────────────────────────────────

IterateState alg1_iterate(std::size_t k, const Vector& xk, const ProblemInstance& problem,
                          const SolverParams& params) {
    IterateState s;
    s.k = k;
    s.x = xk;
    s.rho = params.rho(k);
    s.alpha = params.alpha(k);
    s.beta = params.beta(k);

    const auto opts = prox_options(params);
    s.y = solve_prox({problem.f, problem.set, xk, xk, s.rho}, opts);
    s.z = solve_prox({problem.f, problem.set, s.y, xk, s.rho}, opts);
    finish_iterate(s, s.z, problem, params);
    return s;
}

// ── Linesearch method ───────────────────────────────────────────────

double armijo_gap(const Bifunction& f, const Vector& x, const Vector& y, double step, double rho, double mu) {
    const Vector z = (1.0 - step) * x + step * y;
    return f.evaluate(z, x) - f.evaluate(z, y) - mu / (2.0 * rho) * (x - y).squaredNorm();
}

ArmijoStep armijo_search(const Vector& x, const Vector& y, const Bifunction& f, double rho,
                         const SolverParams& params) {
    if (x == y) throw ValidationError("params", "armijo_search needs y != x");
    for (int m = 1; m <= params.m_max; ++m) {
        const double step = std::pow(params.eta, m);
        if (armijo_gap(f, x, y, step, rho, params.mu) >= 0.0) return {(1.0 - step) * x + step * y, step, m};
    }
    throw LinesearchExhausted("Armijo linesearch found no m <= " + std::to_string(params.m_max));
}

IterateState alg2_iterate(std::size_t k, const Vector& xk, const ProblemInstance& problem,
                          const SolverParams& params) {
    IterateState s;
    s.k = k;
    s.x = xk;
    s.rho = params.rho(k);
    s.alpha = params.alpha(k);
    s.beta = params.beta(k);
    s.gamma = params.gamma(k);

    s.y = solve_prox({problem.f, problem.set, xk, xk, s.rho}, prox_options(params));
    if ((s.y - xk).norm() <= params.tol_stop) {
        s.prox_shortcut = true;
        s.z = xk;
        s.v = xk;
    } else {
        const auto ls = armijo_search(xk, s.y, problem.f, s.rho, params);
        s.z = ls.z;
        s.eta_k = ls.eta_k;
        s.m_k = ls.m_k;
        s.w = problem.f.partial_subgradient(s.z, xk);
        const double wn = s.w->norm();
        if (wn <= 1e-14)
            throw ZeroSubgradient("zero subgradient after a successful linesearch (|w| = " + std::to_string(wn) +
                                  ", m = " + std::to_string(ls.m_k) + ")");
        s.sigma = problem.f.evaluate(s.z, xk) / (wn * wn);
        s.v = project(problem.set, Vector(xk - *s.gamma * *s.sigma * *s.w), params.projection);
    }
    finish_iterate(s, *s.v, problem, params);
    return s;
}

// ── Driver ──────────────────────────────────────────────────────────

std::size_t SolveResult::total_violations() const {
    std::size_t n = 0;
    for (auto v : violations) n += v;
    return n;
}

SolveResult run(const ProblemInstance& problem, const SolverParams& params, Algorithm algorithm,
                const RunOptions& options) {
    if (static_cast<std::size_t>(problem.start.size()) != problem.dimension)
        throw DimensionMismatch("starting point", problem.dimension, static_cast<std::size_t>(problem.start.size()));
    if (infeasibility(problem.set, problem.start) > params.projection.tol_feas)
        throw ValidationError("start", "starting point lies outside C");
    params.validate(algorithm, problem.lipschitz);

    detail::InvariantMonitor monitor(problem, params, algorithm, options.invariants, options.seed);

    SolveResult result;
    result.invariants = monitor.active();
    result.violations.assign(result.invariants.size(), 0);
    result.worst.assign(result.invariants.size(), -std::numeric_limits<double>::infinity());
    result.solution = problem.start;

    Vector x = problem.start;
    std::size_t stalled = 0;
    for (std::size_t k = 0; k < params.max_outer_iters; ++k) {
        IterateState s;
        try {
            s = algorithm == Algorithm::Extragradient ? alg1_iterate(k, x, problem, params)
                                                      : alg2_iterate(k, x, problem, params);
        } catch (NumericalError& e) {
            e.set_iteration(k);
            throw;
        }
        if (options.observer) options.observer(s);

        TraceRow row;
        row.k = k;
        row.res_xy = (s.x - s.y).norm();
        row.res_ux = (s.u - s.x).norm();
        row.step = (s.x_next - s.x).norm();
        row.dist_xg = (s.x - problem.start).norm();
        if (algorithm == Algorithm::Linesearch) row.sigma_w = (s.sigma && s.w) ? *s.sigma * s.w->norm() : 0.0;
        row.eta_k = s.eta_k;
        row.m_k = s.m_k;
        row.invariants = monitor.measure(s);
        for (std::size_t i = 0; i < row.invariants.size(); ++i) {
            if (!row.invariants[i]) continue;
            const double r = *row.invariants[i];
            result.worst[i] = std::max(result.worst[i], r);
            if (!(r <= tolerance(result.invariants[i]))) ++result.violations[i];
        }
        result.trace.push_back(std::move(row));
        const TraceRow& last = result.trace.back();

        x = std::move(s.x_next);
        result.solution = x;
        result.iterations = k + 1;

        const double tol = params.tol_stop;
        if (last.res_xy <= tol && last.res_ux <= tol && last.step <= tol) {
            result.stop_reason = StopReason::FixedPointAndEquilibrium;
            return result;
        }
        stalled = last.step <= tol ? stalled + 1 : 0;
        if (params.stall_window > 0 && stalled >= params.stall_window) {
            result.stop_reason = StopReason::IterateChangeSmall;
            return result;
        }
    }
    result.stop_reason = StopReason::MaxIters;
    return result;
}

}  // namespace eqfix
