#include "eqfix/mapping.hpp"

#include "eqfix/errors.hpp"

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

constexpr double kFixedPointTol = 1e-10;
constexpr double kLimitTol = 1e-8;

}  // namespace

double HybridParams::lhs(const Vector& x, const Vector& y, const Vector& Tx, const Vector& Ty) const {
    return alpha * (Tx - Ty).squaredNorm() + beta * ((x - Ty).squaredNorm() + (y - Tx).squaredNorm()) +
           gamma * (x - y).squaredNorm() + delta * ((x - Tx).squaredNorm() + (y - Ty).squaredNorm());
}

// ── Construction ────────────────────────────────────────────────────

FixedPointMap FixedPointMap::identity(std::size_t n) { return FixedPointMap(IdentityMap{}, n); }

FixedPointMap FixedPointMap::scaling(std::size_t n, double c) {
    FixedPointMap T(ScalingMap{c}, n);
    T.check_parameters();
    return T;
}

FixedPointMap FixedPointMap::projection(ConvexSet set) {
    const std::size_t n = set.dimension();
    return FixedPointMap(ProjectionMap{std::move(set)}, n);
}

FixedPointMap FixedPointMap::affine(Matrix A, Vector b) {
    const auto n = static_cast<std::size_t>(b.size());
    if (static_cast<std::size_t>(A.rows()) != n || static_cast<std::size_t>(A.cols()) != n)
        throw DimensionMismatch("affine map matrix", n, static_cast<std::size_t>(A.rows()));
    FixedPointMap T(AffineMap{std::move(A), std::move(b)}, n);
    T.check_parameters();
    return T;
}

void FixedPointMap::check_parameters() const {
    std::visit(overloaded{
                   [](const ScalingMap& s) {
                       if (!(std::abs(s.c) <= 1.0))
                           throw ValidationError("A5", "scaling factor " + std::to_string(s.c) + " has |c| > 1");
                   },
                   [](const AffineMap& a) {
                       if (!a.A.allFinite() || !a.b.allFinite())
                           throw ValidationError("A5", "affine map has non-finite entries");
                       Eigen::JacobiSVD<Matrix> svd(a.A);
                       const double norm = svd.singularValues()(0);
                       if (norm > 1.0 + 1e-12)
                           throw ValidationError("A5", "affine map has spectral norm " + std::to_string(norm) + " > 1");
                   },
                   [](const auto&) {},
               },
               v_);
}

Vector FixedPointMap::apply(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != n_)
        throw DimensionMismatch("mapping apply", n_, static_cast<std::size_t>(x.size()));
    return std::visit(overloaded{
                          [&](const IdentityMap&) { return Vector(x); },
                          [&](const ScalingMap& s) { return Vector(s.c * x); },
                          [&](const ProjectionMap& p) { return project(p.set, x); },
                          [&](const AffineMap& a) { return Vector(a.A * x + a.b); },
                      },
                      v_);
}

// ── Certification ───────────────────────────────────────────────────

CertifyReport certify_hybrid(const FixedPointMap& T, const HybridParams& params, const ConvexSet& C,
                             std::size_t samples, Rng& rng) {
    if (T.dimension() != C.dimension()) throw DimensionMismatch("certify_hybrid", C.dimension(), T.dimension());

    CertifyReport report;
    report.condition1 = params.condition1();
    report.condition2 = params.condition2();
    report.condition3 = params.condition3();
    report.max_lhs = -std::numeric_limits<double>::infinity();

    const auto pool = sample_points(C, std::max<std::size_t>(samples, 2), rng);
    std::vector<Vector> images;
    images.reserve(pool.size());
    for (const auto& p : pool) images.push_back(T.apply(p));

    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (std::size_t i = 0; i < samples; ++i) {
        const std::size_t a = i % pool.size();
        const std::size_t b = pick(rng);
        const double value = params.lhs(pool[a], pool[b], images[a], images[b]);
        report.max_pair_distance_sq = std::max(report.max_pair_distance_sq, (pool[a] - pool[b]).squaredNorm());
        if (value > report.max_lhs) {
            report.max_lhs = value;
            report.worst_x = pool[a];
            report.worst_y = pool[b];
        }
    }
    report.pairs = samples;
    report.inequality_holds = report.max_lhs <= kHybridTolerance;
    return report;
}

std::vector<HybridParams> hybrid_probe_grid() {
    std::vector<HybridParams> grid;
    for (double alpha : {1.0, 2.0, 3.0, 0.5})
        for (double beta : {0.0, -0.5, -1.0})
            for (double gamma : {-1.0, -0.5, 0.0})
                for (double delta : {0.0, 0.5}) {
                    const HybridParams p{alpha, beta, gamma, delta};
                    if (p.admissible()) grid.push_back(p);
                }
    return grid;
}

bool check_quasi_nonexpansive(const FixedPointMap& T, const Vector& fixed_point, const ConvexSet& C,
                              std::size_t samples, Rng& rng) {
    const double residual = (T.apply(fixed_point) - fixed_point).norm();
    if (residual > kFixedPointTol)
        throw NotAFixedPoint("|Tp - p| = " + std::to_string(residual) + " exceeds 1e-10");
    for (const auto& x : sample_points(C, samples, rng))
        if ((T.apply(x) - fixed_point).norm() > (x - fixed_point).norm() + kFixedPointTol) return false;
    return true;
}

double self_map_violation(const FixedPointMap& T, const ConvexSet& C, std::size_t samples, Rng& rng) {
    double worst = 0.0;
    for (const auto& x : sample_points(C, samples, rng)) worst = std::max(worst, infeasibility(C, T.apply(x)));
    return worst;
}

// ── Trajectory limits ───────────────────────────────────────────────

namespace {

// Multiplier phi such that x_K + phi (x_K - x_{K-1}) estimates the limit.
// Step lengths s_k ~ k^-p give a tail sum of about K s_K / (p - 1); a
// geometric tail is the p -> infinity end of the same formula.
double tail_factor(std::span<const Vector> t) {
    const std::size_t K = t.size();
    if (K < 3) return 0.0;
    const double s1 = (t[K - 1] - t[K - 2]).norm();
    const double s0 = (t[K - 2] - t[K - 3]).norm();
    if (s1 == 0.0 || s0 <= s1) return 0.0;
    const double k = static_cast<double>(K);
    const double p = std::log(s0 / s1) / std::log(k / (k - 1.0));
    if (!(p > 1.0)) return k;
    return std::min(k, k / (p - 1.0));
}

}  // namespace

Vector estimate_limit(std::span<const Vector> trajectory) {
    if (trajectory.empty()) throw NonConvergentTrajectory("empty trajectory");
    const std::size_t K = trajectory.size();
    if (K == 1) return trajectory.back();
    const double phi = tail_factor(trajectory);
    return trajectory[K - 1] + phi * (trajectory[K - 1] - trajectory[K - 2]);
}

bool check_demiclosed_at_zero(const FixedPointMap& T, std::span<const Vector> trajectory) {
    if (trajectory.empty()) throw NonConvergentTrajectory("empty trajectory");
    const std::size_t K = trajectory.size();
    if (K >= 2) {
        const double last_step = (trajectory[K - 1] - trajectory[K - 2]).norm();
        if (last_step >= kLimitTol)
            throw NonConvergentTrajectory("last step " + std::to_string(last_step) + " is not below 1e-8");
    }

    const double phi = tail_factor(trajectory);
    const double r_last = (trajectory[K - 1] - T.apply(trajectory[K - 1])).norm();
    double r_limit = r_last;
    if (K >= 2) {
        const double r_prev = (trajectory[K - 2] - T.apply(trajectory[K - 2])).norm();
        r_limit = std::max(0.0, r_last + phi * (r_last - r_prev));
    }
    const bool residuals_vanish = r_limit <= kLimitTol;
    // Premise fails: the implication holds vacuously.
    if (!residuals_vanish) return true;

    const Vector limit = estimate_limit(trajectory);
    return (T.apply(limit) - limit).norm() <= kLimitTol;
}

}  // namespace eqfix
