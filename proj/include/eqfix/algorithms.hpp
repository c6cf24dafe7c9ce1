#pragma once

#include "eqfix/geometry.hpp"
#include "eqfix/invariants.hpp"
#include "eqfix/problem.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace eqfix {

enum class Algorithm {
    Extragradient,  // two prox steps per iteration, needs Lipschitz-type constants
    Linesearch,     // one prox step plus Armijo backtracking
};

std::string_view to_string(Algorithm a);
/// Accepts "extragradient" and "linesearch".
std::optional<Algorithm> parse_algorithm(std::string_view name);

/// A parameter sequence k -> value together with its declared range.
struct Schedule {
    std::function<double(std::size_t)> at;
    double lo = 0.0;
    double hi = 0.0;

    double operator()(std::size_t k) const { return at(k); }
    static Schedule constant(double v);
};

struct SolverParams {
    Schedule rho;
    Schedule alpha;  // in [0, 1], tending to 1
    Schedule beta;   // in [0, beta_bar], beta_bar < 1
    Schedule gamma;  // in [gamma_lo, gamma_hi] ⊂ (0, 2); linesearch only
    double eta = 0.5;
    double mu = 0.4;
    int m_max = 60;
    double tol_stop = 1e-8;
    std::size_t max_outer_iters = 20'000;
    /// Consecutive iterations with |x^{k+1} - x^k| <= tol_stop, without the
    /// residual test passing, before the run is declared stalled.
    std::size_t stall_window = 10;
    double inner_tol = 1e-10;
    std::size_t max_inner_iters = 5000;
    ProjectionTolerances projection;

    /// alpha_k = 1 - 1/(k+2), beta_k = 0.5, gamma_k = 1; rho is
    /// 0.9 min{1/(2 L1), 1/(2 L2)} for the extragradient method and 1 for
    /// the linesearch method.
    static SolverParams defaults(Algorithm a, const std::optional<LipschitzConstants>& lipschitz = {});

    /// Throws ValidationError("params") when a range condition fails.
    void validate(Algorithm a, const std::optional<LipschitzConstants>& lipschitz) const;
};

/// Everything computed in one outer iteration k.
struct IterateState {
    std::size_t k = 0;
    Vector x;  // x^k
    Vector y;
    Vector z;  // corrector (extragradient) or linesearch point
    Vector t;
    Vector u;
    std::optional<Vector> v;
    std::optional<Vector> w;
    std::optional<double> sigma;
    std::optional<double> eta_k;
    std::optional<int> m_k;
    Halfspace Ck;
    Halfspace Qk;
    Vector x_next;

    double rho = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    std::optional<double> gamma;
    bool prox_shortcut = false;  // linesearch method took the y^k = x^k branch
};

/// {p : |p - u| <= |p - x|} as a halfspace; the whole space when u == x.
Halfspace hybrid_cut(const Vector& x, const Vector& u);
/// {p : <p - x, anchor - x> <= 0}; the whole space when x == anchor.
Halfspace anchor_cut(const Vector& x, const Vector& anchor);

/// Projection of `anchor` onto Ck ∩ Qk ∩ C through project_with_cuts.
/// Throws EmptyIntersection when no projection is found.
Vector hybrid_projection(const Halfspace& Ck, const Halfspace& Qk, const ConvexSet& C, const Vector& anchor,
                         const ProjectionTolerances& tol);

IterateState alg1_iterate(std::size_t k, const Vector& xk, const ProblemInstance& problem,
                          const SolverParams& params);

struct ArmijoStep {
    Vector z;
    double eta_k = 0.0;
    int m_k = 0;
};

/// f(z, x) - f(z, y) - mu / (2 rho) |x - y|^2 for z = (1 - s) x + s y.
double armijo_gap(const Bifunction& f, const Vector& x, const Vector& y, double step, double rho, double mu);

/// Smallest m in 1..m_max with armijo_gap(eta^m) >= 0. Throws
/// LinesearchExhausted otherwise.
ArmijoStep armijo_search(const Vector& x, const Vector& y, const Bifunction& f, double rho,
                         const SolverParams& params);

IterateState alg2_iterate(std::size_t k, const Vector& xk, const ProblemInstance& problem,
                          const SolverParams& params);

enum class StopReason { FixedPointAndEquilibrium, IterateChangeSmall, MaxIters };
std::string_view to_string(StopReason r);

struct TraceRow {
    std::size_t k = 0;
    double res_xy = 0.0;   // |x^k - y^k|
    double res_ux = 0.0;   // |u^k - x^k|
    double step = 0.0;     // |x^{k+1} - x^k|
    double dist_xg = 0.0;  // |x^k - x^g|
    std::optional<double> sigma_w;
    std::optional<double> eta_k;
    std::optional<int> m_k;
    std::vector<std::optional<double>> invariants;  // aligned with SolveResult::invariants
};

struct SolveResult {
    Vector solution;
    std::size_t iterations = 0;
    StopReason stop_reason = StopReason::MaxIters;
    std::vector<TraceRow> trace;
    std::vector<Invariant> invariants;
    std::vector<std::size_t> violations;  // per entry of `invariants`
    std::vector<double> worst;            // largest residual per invariant

    std::size_t total_violations() const;
};

struct RunOptions {
    InvariantSelection invariants = InvariantSelection::all();
    std::uint64_t seed = 0;
    std::function<void(const IterateState&)> observer;
};

/// Iterates from problem.start until the residual test, the stall test or
/// the iteration cap fires. Numerical errors propagate with the iteration
/// index attached.
SolveResult run(const ProblemInstance& problem, const SolverParams& params, Algorithm algorithm,
                const RunOptions& options = {});

}  // namespace eqfix
