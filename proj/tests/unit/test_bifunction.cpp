#include "doctest.h"

#include "eqfix/bifunction.hpp"
#include "eqfix/errors.hpp"

#include <cmath>

using namespace eqfix;

namespace {

Vector gauss(Eigen::Index n, Rng& rng) {
    std::normal_distribution<double> g;
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = g(rng);
    return v;
}

Matrix random_matrix(Eigen::Index n, Rng& rng) {
    Matrix m(n, n);
    for (Eigen::Index j = 0; j < n; ++j) m.col(j) = gauss(n, rng);
    return m;
}

std::vector<Bifunction> sample_bifunctions(Eigen::Index n, Rng& rng) {
    std::vector<Bifunction> out;
    out.push_back(Bifunction::vi(IdentityOperator{}, n));
    out.push_back(Bifunction::vi(RotationOperator{0.7}, n));
    out.push_back(Bifunction::vi(AffineOperator{random_matrix(n, rng), gauss(n, rng)}, n));
    const Matrix G = random_matrix(n, rng), N = random_matrix(n, rng);
    const Matrix Q = N * N.transpose() / static_cast<double>(n);
    out.push_back(Bifunction::quadratic(Q + G * G.transpose(), Q, gauss(n, rng)));
    return out;
}

}  // namespace

TEST_CASE("f vanishes on the diagonal") {
    Rng rng(1);
    for (Eigen::Index n : {1, 2, 5}) {
        for (const auto& f : sample_bifunctions(n, rng)) {
            for (int i = 0; i < 20; ++i) {
                const Vector x = gauss(n, rng);
                CHECK(std::abs(f.evaluate(x, x)) <= 1e-14);
            }
        }
    }
}

TEST_CASE("partial subgradient matches central differences") {
    Rng rng(2);
    const double h = 1e-6;
    for (Eigen::Index n : {1, 3, 6}) {
        for (const auto& f : sample_bifunctions(n, rng)) {
            const Vector z = gauss(n, rng), x = gauss(n, rng);
            const Vector g = f.partial_subgradient(z, x);
            Vector fd(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                Vector e = Vector::Zero(n);
                e(i) = h;
                fd(i) = (f.evaluate(z, x + e) - f.evaluate(z, x - e)) / (2 * h);
            }
            CHECK((g - fd).norm() <= 1e-6 * (1.0 + g.norm()));
        }
    }
}

TEST_CASE("three-point identity of the quadratic bifunction") {
    // f(x,y) + f(y,z) - f(x,z) = <(P - Q)(y - x), z - y> for this family.
    Rng rng(3);
    const Eigen::Index n = 4;
    const Matrix G = random_matrix(n, rng), N = random_matrix(n, rng);
    const Matrix Q = N * N.transpose(), P = G + G.transpose();
    const auto f = Bifunction::quadratic(P, Q, gauss(n, rng));
    for (int i = 0; i < 50; ++i) {
        const Vector x = gauss(n, rng), y = gauss(n, rng), z = gauss(n, rng);
        const double lhs = f.evaluate(x, y) + f.evaluate(y, z) - f.evaluate(x, z);
        const double rhs = ((P - Q) * (y - x)).dot(z - y);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("rotation acts pairwise and fixes a trailing coordinate") {
    const double th = 0.3;
    Vector x(3);
    x << 1.0, 0.0, 5.0;
    const Vector Fx = apply_operator(RotationOperator{th}, x);
    CHECK(Fx(0) == doctest::Approx(std::cos(th)));
    CHECK(Fx(1) == doctest::Approx(std::sin(th)));
    CHECK(Fx(2) == 5.0);
    CHECK(operator_norm(RotationOperator{th}, 3) == doctest::Approx(1.0));
    CHECK(operator_monotonicity(RotationOperator{th}, 2) == doctest::Approx(std::cos(th)));
}

TEST_CASE("quadratic factory rejects invalid matrices") {
    Matrix Q = Matrix::Identity(2, 2);
    Q(1, 1) = -1.0;
    CHECK_THROWS_AS(Bifunction::quadratic(Matrix::Identity(2, 2), Q, Vector::Zero(2)), NonConvexInY);
    Matrix P = Matrix::Identity(2, 2);
    P(0, 1) = 1.0;
    CHECK_THROWS_AS(Bifunction::quadratic(P, Matrix::Identity(2, 2), Vector::Zero(2)), ValidationError);
    CHECK_THROWS_AS(Bifunction::quadratic(Matrix::Identity(2, 2), Matrix::Identity(3, 3), Vector::Zero(2)),
                    DimensionMismatch);
}

TEST_CASE("analytic Lipschitz constants satisfy the inequality") {
    Rng rng(4);
    const auto C = ConvexSet::box(Vector::Constant(3, -2.0), Vector::Constant(3, 2.0));
    for (const auto& f : sample_bifunctions(3, rng)) {
        const auto c = f.analytic_lipschitz();
        CHECK(c.L1 == c.L2);
        CHECK(c.L1 >= kLipschitzFloor);
        const auto xs = sample_points(C, 500, rng), ys = sample_points(C, 500, rng), zs = sample_points(C, 500, rng);
        CHECK(lipschitz_violation(f, c, xs, ys, zs) <= 1e-9);
        // Halving the constant breaks it unless it sits at the floor.
        if (c.L1 > 1e-3) CHECK(lipschitz_violation(f, {c.L1 / 4, c.L2 / 4}, xs, ys, zs) > 0.0);
    }
}

TEST_CASE("identity operator has the floor constant") {
    const auto f = Bifunction::vi(IdentityOperator{}, 2);
    CHECK(f.analytic_lipschitz().L1 == doctest::Approx(0.5));
}

TEST_CASE("estimated constants bound the sampled ratio") {
    Rng rng(5);
    const auto C = ConvexSet::ball(Vector::Zero(3), 1.0);
    for (const auto& f : sample_bifunctions(3, rng)) {
        const auto est = estimate_lipschitz(f, C, 300, rng);
        CHECK(est.triples == 300);
        CHECK(est.constants.L1 == doctest::Approx(kLipschitzSafety * est.grid_value));
        CHECK(est.grid_value >= est.sampled_ratio);
        CHECK(est.analytic.has_value());
    }
}
