#include "doctest.h"

#include "eqfix/algorithms.hpp"
#include "eqfix/errors.hpp"
#include "instances.hpp"

#include <cmath>

using namespace eqfix;
using namespace eqfix::testsupport;

namespace {

Vector gauss(Eigen::Index n, Rng& rng) {
    std::normal_distribution<double> g;
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = g(rng);
    return v;
}

ProblemInstance small_instance(bool quadratic, MapKind map = MapKind::Identity) {
    return generate_instance({3, SetKind::Box, quadratic, map, 77});
}

constexpr Algorithm kBoth[] = {Algorithm::Extragradient, Algorithm::Linesearch};

}  // namespace

TEST_CASE("algorithm names round-trip") {
    for (Algorithm a : kBoth) CHECK(parse_algorithm(to_string(a)) == a);
    CHECK_FALSE(parse_algorithm("newton").has_value());
}

TEST_CASE("hybrid cut keeps the points closer to u than to x") {
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const Vector x = gauss(3, rng), u = gauss(3, rng), p = gauss(3, rng);
        const bool inside = hybrid_cut(x, u).residual(p) <= 1e-12;
        const double margin = (p - x).norm() - (p - u).norm();
        if (std::abs(margin) > 1e-9) CHECK(inside == (margin > 0));
    }
    const Vector x = gauss(3, rng);
    CHECK(hybrid_cut(x, x).is_whole_space());
    CHECK(anchor_cut(x, x).is_whole_space());
}

TEST_CASE("anchor cut contains exactly the points on the far side of x") {
    Rng rng(2);
    for (int i = 0; i < 200; ++i) {
        const Vector x = gauss(2, rng), g = gauss(2, rng), p = gauss(2, rng);
        const double s = (p - x).dot(g - x);
        if (std::abs(s) > 1e-9) CHECK((anchor_cut(x, g).residual(p) <= 0.0) == (s <= 0.0));
    }
}

TEST_CASE("Armijo search picks the smallest admissible exponent") {
    // For F = identity the gap at z is <z, x - y> - mu / (2 rho) |x - y|^2.
    Rng rng(3);
    const auto f = Bifunction::vi(IdentityOperator{}, 2);
    auto params = SolverParams::defaults(Algorithm::Linesearch);
    for (int trial = 0; trial < 200; ++trial) {
        const Vector x = gauss(2, rng), y = gauss(2, rng);
        const double rho = 0.1 + std::abs(gauss(1, rng)(0));
        int expected = 0;
        for (int m = 1; m <= params.m_max && expected == 0; ++m) {
            const double s = std::pow(params.eta, m);
            const Vector z = (1 - s) * x + s * y;
            if (z.dot(x - y) - params.mu / (2 * rho) * (x - y).squaredNorm() >= 0.0) expected = m;
        }
        CAPTURE(trial);
        if (expected == 0) {
            CHECK_THROWS_AS(armijo_search(x, y, f, rho, params), LinesearchExhausted);
        } else {
            const auto step = armijo_search(x, y, f, rho, params);
            CHECK(step.m_k == expected);
            CHECK(step.eta_k == std::pow(params.eta, expected));
        }
    }
}

TEST_CASE("Armijo search error paths") {
    const auto f = Bifunction::vi(IdentityOperator{}, 2);
    auto params = SolverParams::defaults(Algorithm::Linesearch);
    Vector x(2), y(2);
    x << 1, 0;
    y << 0, 0;
    CHECK_THROWS_AS(armijo_search(x, x, f, 1.0, params), ValidationError);
    params.m_max = 3;
    // mu / (2 rho) = 20 dominates <z, x - y> <= 1.
    CHECK_THROWS_AS(armijo_search(x, y, f, 0.01, params), LinesearchExhausted);
}

TEST_CASE("parameter validation") {
    const LipschitzConstants L{1.0, 2.0};
    auto p = SolverParams::defaults(Algorithm::Extragradient, L);
    CHECK(p.rho(0) == doctest::Approx(0.9 * 0.25));
    CHECK(p.alpha(0) == doctest::Approx(0.5));
    CHECK(p.alpha(8) == doctest::Approx(0.9));
    CHECK(p.beta(3) == 0.5);
    CHECK_NOTHROW(p.validate(Algorithm::Extragradient, L));

    try {
        p.validate(Algorithm::Extragradient, std::nullopt);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(e.assumption() == "A4");
    }

    auto bad = p;
    bad.rho = Schedule::constant(0.25);
    CHECK_THROWS_AS(bad.validate(Algorithm::Extragradient, L), ValidationError);
    bad = p;
    bad.beta = Schedule::constant(1.0);
    CHECK_THROWS_AS(bad.validate(Algorithm::Extragradient, L), ValidationError);
    bad = p;
    bad.alpha = Schedule{[](std::size_t k) { return k < 5 ? 0.5 : 1.5; }, 0.0, 1.0};
    CHECK_THROWS_AS(bad.validate(Algorithm::Extragradient, L), ValidationError);

    auto q = SolverParams::defaults(Algorithm::Linesearch);
    CHECK(q.rho(0) == 1.0);
    CHECK(q.gamma(0) == 1.0);
    CHECK_NOTHROW(q.validate(Algorithm::Linesearch, std::nullopt));
    for (double g : {0.0, 2.0}) {
        auto b = q;
        b.gamma = Schedule::constant(g);
        CHECK_THROWS_AS(b.validate(Algorithm::Linesearch, std::nullopt), ValidationError);
    }
    auto b = q;
    b.eta = 1.0;
    CHECK_THROWS_AS(b.validate(Algorithm::Linesearch, std::nullopt), ValidationError);
    b = q;
    b.m_max = 0;
    CHECK_THROWS_AS(b.validate(Algorithm::Linesearch, std::nullopt), ValidationError);
}

TEST_CASE("zero iterations return the starting point") {
    const auto problem = small_instance(false);
    for (Algorithm a : kBoth) {
        auto params = SolverParams::defaults(a, problem.lipschitz);
        params.max_outer_iters = 0;
        const auto r = run(problem, params, a);
        CHECK(r.iterations == 0);
        CHECK(r.stop_reason == StopReason::MaxIters);
        CHECK(r.trace.empty());
        CHECK(r.solution == problem.start);
    }
}

TEST_CASE("starting at a solution stops after one iteration") {
    for (bool quadratic : {false, true}) {
        auto problem = small_instance(quadratic, MapKind::SubsetProjection);
        problem.start = *problem.known_solution;
        for (Algorithm a : kBoth) {
            const auto r = run(problem, SolverParams::defaults(a, problem.lipschitz), a);
            CHECK(r.iterations == 1);
            CHECK(r.stop_reason == StopReason::FixedPointAndEquilibrium);
            CHECK((r.solution - problem.start).norm() <= 1e-8);
            CHECK(r.total_violations() == 0);
        }
    }
}

TEST_CASE("invalid starting points are rejected") {
    auto problem = small_instance(false);
    const auto params = SolverParams::defaults(Algorithm::Linesearch);
    problem.start = Vector::Constant(3, 10.0);
    CHECK_THROWS_AS(run(problem, params, Algorithm::Linesearch), ValidationError);
    problem.start = Vector::Zero(2);
    CHECK_THROWS_AS(run(problem, params, Algorithm::Linesearch), DimensionMismatch);
}

TEST_CASE("runs keep every invariant and move away from the anchor") {
    for (bool quadratic : {false, true})
        for (MapKind map : {MapKind::Identity, MapKind::SubsetProjection, MapKind::Contraction}) {
            const auto problem = small_instance(quadratic, map);
            for (Algorithm a : kBoth) {
                auto params = SolverParams::defaults(a, problem.lipschitz);
                params.max_outer_iters = 300;
                const auto r = run(problem, params, a);
                CAPTURE(quadratic);
                CAPTURE(to_string(a));
                CHECK(r.total_violations() == 0);
                CHECK(r.invariants.size() > 0);
                CHECK(infeasibility(problem.set, r.solution) <= 1e-9);
                for (std::size_t k = 1; k < r.trace.size(); ++k)
                    CHECK(r.trace[k].dist_xg >= r.trace[k - 1].dist_xg - 1e-10);
                // Every iterate stays within |q - x^g| of the anchor.
                const double bound = (*problem.known_solution - problem.start).norm();
                CHECK((r.solution - problem.start).norm() <= bound + 1e-9);
                for (const auto& row : r.trace) {
                    CHECK(row.eta_k.has_value() == (a == Algorithm::Linesearch && row.m_k.has_value()));
                    CHECK(row.sigma_w.has_value() == (a == Algorithm::Linesearch));
                }
            }
        }
}

TEST_CASE("numerical errors carry the iteration index") {
    const auto problem = small_instance(true);
    auto params = SolverParams::defaults(Algorithm::Extragradient, problem.lipschitz);
    params.max_inner_iters = 1;
    try {
        run(problem, params, Algorithm::Extragradient);
        FAIL("expected the inner solver to fail");
    } catch (const InnerNoConvergence& e) {
        REQUIRE(e.iteration().has_value());
        CHECK(*e.iteration() == 0);
        CHECK(std::string(e.what()).rfind("iteration 0: ", 0) == 0);
        CHECK(e.exit_code() == ExitCode::Numerical);
    }
}

TEST_CASE("observer sees every iterate") {
    const auto problem = small_instance(false);
    auto params = SolverParams::defaults(Algorithm::Linesearch);
    params.max_outer_iters = 25;
    std::size_t seen = 0;
    RunOptions opts;
    opts.invariants = InvariantSelection::none();
    opts.observer = [&](const IterateState& s) {
        CHECK(s.k == seen);
        ++seen;
    };
    const auto r = run(problem, params, Algorithm::Linesearch, opts);
    CHECK(seen == r.iterations);
    CHECK(r.invariants.empty());
}
