#include "eqfix/bifunction.hpp"

#include "eqfix/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace eqfix {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_dim(const Vector& x, std::size_t n, const char* where) {
    if (static_cast<std::size_t>(x.size()) != n) throw DimensionMismatch(where, n, static_cast<std::size_t>(x.size()));
}

bool is_symmetric(const Matrix& M) {
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    return (M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

double spectral_norm(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(M);
    return svd.singularValues()(0);
}

double min_symmetric_eigenvalue(const Matrix& M) {
    const Matrix S = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

}  // namespace

// ── Operators ───────────────────────────────────────────────────────

Vector apply_operator(const Operator& op, const Vector& x) {
    return std::visit(overloaded{
                          [&](const IdentityOperator&) { return Vector(x); },
                          [&](const AffineOperator& a) { return Vector(a.A * x + a.b); },
                          [&](const RotationOperator& r) {
                              const double c = std::cos(r.theta);
                              const double s = std::sin(r.theta);
                              Vector out = x;
                              for (Eigen::Index i = 0; i + 1 < x.size(); i += 2) {
                                  out[i] = c * x[i] - s * x[i + 1];
                                  out[i + 1] = s * x[i] + c * x[i + 1];
                              }
                              return out;
                          },
                      },
                      op);
}

double operator_norm(const Operator& op, std::size_t) {
    return std::visit(overloaded{
                          [](const IdentityOperator&) { return 1.0; },
                          [](const AffineOperator& a) { return spectral_norm(a.A); },
                          [](const RotationOperator&) { return 1.0; },
                      },
                      op);
}

double operator_monotonicity(const Operator& op, std::size_t n) {
    return std::visit(overloaded{
                          [](const IdentityOperator&) { return 1.0; },
                          [](const AffineOperator& a) { return min_symmetric_eigenvalue(a.A); },
                          [n](const RotationOperator& r) { return n >= 2 ? std::min(1.0, std::cos(r.theta)) : 1.0; },
                      },
                      op);
}

// ── Bifunction ──────────────────────────────────────────────────────

Bifunction Bifunction::vi(Operator F, std::size_t n) {
    if (n == 0) throw ValidationError("bifunction", "dimension 0");
    if (const auto* a = std::get_if<AffineOperator>(&F)) {
        if (static_cast<std::size_t>(a->A.rows()) != n || static_cast<std::size_t>(a->A.cols()) != n)
            throw DimensionMismatch("affine operator matrix", n, static_cast<std::size_t>(a->A.rows()));
        require_dim(a->b, n, "affine operator offset");
        if (!a->A.allFinite() || !a->b.allFinite())
            throw ValidationError("bifunction", "affine operator has non-finite entries");
    }
    if (const auto* r = std::get_if<RotationOperator>(&F); r && !std::isfinite(r->theta))
        throw ValidationError("bifunction", "rotation angle is not finite");
    const double norm = operator_norm(F, n);
    Bifunction f(VIInduced{std::move(F)}, n);
    f.curvature_ = 0.0;
    f.analytic_L_ = std::max(kLipschitzFloor, 0.5 * norm);
    return f;
}

Bifunction Bifunction::quadratic(Matrix P, Matrix Q, Vector q) {
    const auto n = static_cast<std::size_t>(q.size());
    if (n == 0) throw ValidationError("bifunction", "dimension 0");
    if (static_cast<std::size_t>(P.rows()) != n || static_cast<std::size_t>(P.cols()) != n)
        throw DimensionMismatch("quadratic bifunction P", n, static_cast<std::size_t>(P.rows()));
    if (static_cast<std::size_t>(Q.rows()) != n || static_cast<std::size_t>(Q.cols()) != n)
        throw DimensionMismatch("quadratic bifunction Q", n, static_cast<std::size_t>(Q.rows()));
    if (!P.allFinite() || !Q.allFinite() || !q.allFinite())
        throw ValidationError("bifunction", "quadratic bifunction has non-finite entries");
    if (!is_symmetric(P)) throw ValidationError("bifunction", "P is not symmetric");
    if (!is_symmetric(Q)) throw ValidationError("bifunction", "Q is not symmetric");
    const double lambda_min = min_symmetric_eigenvalue(Q);
    if (lambda_min < -1e-10)
        throw NonConvexInY("f(x, .) is not convex: Q has eigenvalue " + std::to_string(lambda_min));

    const double q_norm = spectral_norm(Q);
    const double pq_norm = spectral_norm(P - Q);
    Bifunction f(QuadraticSaddle{std::move(P), std::move(Q), std::move(q)}, n);
    f.curvature_ = 2.0 * q_norm;
    f.analytic_L_ = std::max(kLipschitzFloor, 0.5 * pq_norm);
    return f;
}

double Bifunction::evaluate(const Vector& x, const Vector& y) const {
    require_dim(x, n_, "bifunction evaluate (x)");
    require_dim(y, n_, "bifunction evaluate (y)");
    return std::visit(overloaded{
                          [&](const VIInduced& vi) { return apply_operator(vi.F, x).dot(y - x); },
                          [&](const QuadraticSaddle& s) { return (s.P * x + s.Q * y + s.q).dot(y - x); },
                      },
                      v_);
}

Vector Bifunction::partial_subgradient(const Vector& z, const Vector& x) const {
    require_dim(z, n_, "partial subgradient (z)");
    require_dim(x, n_, "partial subgradient (x)");
    return std::visit(overloaded{
                          [&](const VIInduced& vi) { return apply_operator(vi.F, z); },
                          // d/dy <P z + Q y + q, y - z> = P z + Q y + q + Q (y - z), Q symmetric.
                          [&](const QuadraticSaddle& s) { return Vector(s.P * z + s.q + s.Q * x + s.Q * (x - z)); },
                      },
                      v_);
}

LipschitzConstants Bifunction::analytic_lipschitz() const { return {analytic_L_, analytic_L_}; }

// ── Lipschitz-type constants ────────────────────────────────────────

double lipschitz_violation(const Bifunction& f, const LipschitzConstants& c, std::span<const Vector> xs,
                           std::span<const Vector> ys, std::span<const Vector> zs) {
    double worst = -std::numeric_limits<double>::infinity();
    const std::size_t m = std::min({xs.size(), ys.size(), zs.size()});
    for (std::size_t i = 0; i < m; ++i) {
        const Vector& x = xs[i];
        const Vector& y = ys[i];
        const Vector& z = zs[i];
        const double lhs = f.evaluate(x, y) + f.evaluate(y, z);
        const double rhs = f.evaluate(x, z) - c.L1 * (x - y).squaredNorm() - c.L2 * (y - z).squaredNorm();
        worst = std::max(worst, rhs - lhs);
    }
    return worst;
}

LipschitzEstimate estimate_lipschitz(const Bifunction& f, const ConvexSet& C, std::size_t samples, Rng& rng) {
    if (samples < 100) throw ValidationError("A4", "Lipschitz estimation needs at least 100 samples");
    if (C.dimension() != f.dimension()) throw DimensionMismatch("estimate_lipschitz", f.dimension(), C.dimension());

    constexpr double slack = 1e-9;
    constexpr int grid_steps = 120;  // 1e-6 .. 1e6, ten points per decade

    const auto pts = sample_points(C, 3 * samples, rng);
    std::vector<Vector> xs, ys, zs;
    xs.reserve(samples);
    ys.reserve(samples);
    zs.reserve(samples);
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    for (std::size_t i = 0; i < samples; ++i) {
        xs.push_back(pts[pick(rng)]);
        ys.push_back(pts[pick(rng)]);
        zs.push_back(pts[pick(rng)]);
    }

    double required = 0.0;
    double ratio = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double gap = f.evaluate(xs[i], zs[i]) - f.evaluate(xs[i], ys[i]) - f.evaluate(ys[i], zs[i]);
        const double denom = (xs[i] - ys[i]).squaredNorm() + (ys[i] - zs[i]).squaredNorm();
        if (denom == 0.0) {
            if (gap > slack) throw ValidationError("A4", "Lipschitz-type inequality fails at coincident points");
            continue;
        }
        ratio = std::max(ratio, gap / denom);
        required = std::max(required, (gap - slack) / denom);
    }

    LipschitzEstimate out;
    out.triples = samples;
    out.sampled_ratio = ratio;
    bool found = false;
    for (int j = 0; j <= grid_steps; ++j) {
        const double candidate = kLipschitzFloor * std::pow(10.0, j / 10.0);
        if (candidate >= required) {
            out.grid_value = candidate;
            found = true;
            break;
        }
    }
    if (!found) throw ValidationError("A4", "no Lipschitz-type constant up to 1e6 passes the sampled check");
    out.constants = {kLipschitzSafety * out.grid_value, kLipschitzSafety * out.grid_value};

    const auto analytic = f.analytic_lipschitz();
    if (lipschitz_violation(f, analytic, xs, ys, zs) <= slack) out.analytic = analytic;
    return out;
}

}  // namespace eqfix
