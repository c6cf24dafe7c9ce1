#pragma once

#include "eqfix/geometry.hpp"

#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace eqfix {

/// Parameters (alpha, beta, gamma, delta) of a symmetric generalized hybrid
/// mapping:
///   alpha |Tx-Ty|^2 + beta (|x-Ty|^2 + |y-Tx|^2) + gamma |x-y|^2
///     + delta (|x-Tx|^2 + |y-Ty|^2) <= 0.
struct HybridParams {
    double alpha = 1.0;
    double beta = 0.0;
    double gamma = -1.0;
    double delta = 0.0;

    bool condition1() const { return alpha + 2.0 * beta + gamma >= 0.0; }
    bool condition2() const { return alpha + beta > 0.0; }
    bool condition3() const { return delta >= 0.0; }
    bool admissible() const { return condition1() && condition2() && condition3(); }

    /// Left-hand side of the hybrid inequality for one pair.
    double lhs(const Vector& x, const Vector& y, const Vector& Tx, const Vector& Ty) const;

    static HybridParams nonexpansive() { return {1.0, 0.0, -1.0, 0.0}; }
};

struct IdentityMap {};
struct ScalingMap {
    double c = 1.0;
};
struct ProjectionMap {
    ConvexSet set;
};
struct AffineMap {
    Matrix A;
    Vector b;
};

class FixedPointMap {
public:
    using Variant = std::variant<IdentityMap, ScalingMap, ProjectionMap, AffineMap>;

    static FixedPointMap identity(std::size_t n);
    /// Requires |c| <= 1.
    static FixedPointMap scaling(std::size_t n, double c);
    static FixedPointMap projection(ConvexSet set);
    /// Requires |A|_2 <= 1.
    static FixedPointMap affine(Matrix A, Vector b);

    /// Builds a map without the parameter-range checks, for probing
    /// certifiers with maps that are known to be invalid.
    static FixedPointMap unchecked(Variant v, std::size_t n) { return FixedPointMap(std::move(v), n); }

    std::size_t dimension() const { return n_; }
    const Variant& variant() const { return v_; }

    const std::optional<HybridParams>& hybrid_params() const { return hybrid_; }
    void set_hybrid_params(HybridParams p) { hybrid_ = p; }

    Vector apply(const Vector& x) const;

    /// Throws ValidationError("A5") when the variant's own parameter range is
    /// violated (|c| > 1, |A|_2 > 1).
    void check_parameters() const;

private:
    FixedPointMap(Variant v, std::size_t n) : v_(std::move(v)), n_(n) {}

    Variant v_;
    std::size_t n_ = 0;
    std::optional<HybridParams> hybrid_;
};

struct CertifyReport {
    double max_lhs = 0.0;
    bool inequality_holds = false;  // max_lhs <= 1e-9
    bool condition1 = false;
    bool condition2 = false;
    bool condition3 = false;
    std::size_t pairs = 0;
    double max_pair_distance_sq = 0.0;  // max |x-y|^2 over the sampled pairs
    Vector worst_x;
    Vector worst_y;

    bool passed() const { return inequality_holds && condition1 && condition2 && condition3; }
};

inline constexpr double kHybridTolerance = 1e-9;

/// Samples `samples` pairs from C x C (box vertices and sphere points
/// included) and reports the largest left-hand side of the hybrid
/// inequality. A passing report is evidence, not proof.
CertifyReport certify_hybrid(const FixedPointMap& T, const HybridParams& params, const ConvexSet& C,
                             std::size_t samples, Rng& rng);

/// Admissible parameter probes (all three conditions hold) used when a problem
/// file does not name the mapping's parameters.
std::vector<HybridParams> hybrid_probe_grid();

/// |Tx - p| <= |x - p| + 1e-10 on sampled x in C. Throws NotAFixedPoint if
/// |Tp - p| > 1e-10.
bool check_quasi_nonexpansive(const FixedPointMap& T, const Vector& fixed_point, const ConvexSet& C,
                              std::size_t samples, Rng& rng);

/// Finite-dimensional surrogate of demiclosedness of I - T at zero: if the
/// residuals |x^k - Tx^k| vanish along a convergent trajectory then its limit
/// is a fixed point (to 1e-8). The limit is extrapolated from the tail.
/// Throws NonConvergentTrajectory when the last step exceeds 1e-8.
bool check_demiclosed_at_zero(const FixedPointMap& T, std::span<const Vector> trajectory);

/// Tail extrapolation of a convergent sequence, assuming power-law or
/// geometric decay of the step length.
Vector estimate_limit(std::span<const Vector> trajectory);

/// Largest distance from T(x) to C over sampled x in C.
double self_map_violation(const FixedPointMap& T, const ConvexSet& C, std::size_t samples, Rng& rng);

}  // namespace eqfix
