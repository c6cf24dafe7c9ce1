#pragma once

#include "eqfix/geometry.hpp"

#include <optional>
#include <string>
#include <variant>

namespace eqfix {

/// Constants of the Lipschitz-type condition
/// f(x,y) + f(y,z) >= f(x,z) - L1 |x-y|^2 - L2 |y-z|^2.
struct LipschitzConstants {
    double L1 = 0.0;
    double L2 = 0.0;
};

// Operators F for variational-inequality bifunctions f(x,y) = <F(x), y - x>.
struct IdentityOperator {};
struct AffineOperator {
    Matrix A;
    Vector b;
};
/// Rotates each coordinate pair (0,1), (2,3), ... by `theta`; a trailing odd
/// coordinate is left unchanged.
struct RotationOperator {
    double theta = 0.0;
};
using Operator = std::variant<IdentityOperator, AffineOperator, RotationOperator>;

Vector apply_operator(const Operator& op, const Vector& x);
/// Spectral norm of the (linear part of the) operator.
double operator_norm(const Operator& op, std::size_t n);
/// Smallest eigenvalue of the symmetric part; >= 0 means F is monotone.
double operator_monotonicity(const Operator& op, std::size_t n);

struct VIInduced {
    Operator F;
};

/// f(x,y) = <P x + Q y + q, y - x> with P, Q symmetric and Q positive
/// semidefinite.
struct QuadraticSaddle {
    Matrix P;
    Matrix Q;
    Vector q;
};

class Bifunction {
public:
    using Variant = std::variant<VIInduced, QuadraticSaddle>;

    static Bifunction vi(Operator F, std::size_t n);
    /// Throws NonConvexInY when Q has an eigenvalue below -1e-10 and
    /// ValidationError when P or Q is not symmetric.
    static Bifunction quadratic(Matrix P, Matrix Q, Vector q);

    std::size_t dimension() const { return n_; }
    const Variant& variant() const { return v_; }
    bool is_vi() const { return std::holds_alternative<VIInduced>(v_); }

    const std::optional<LipschitzConstants>& lipschitz() const { return lipschitz_; }
    void set_lipschitz(LipschitzConstants c) { lipschitz_ = c; }

    double evaluate(const Vector& x, const Vector& y) const;

    /// Gradient of y -> f(z, y) at y = x. Both shipped variants are smooth in
    /// y, so the subdifferential is a singleton.
    Vector partial_subgradient(const Vector& z, const Vector& x) const;

    /// Upper bound on the curvature of y -> f(a, y): 2 |Q|_2 for the
    /// quadratic variant, 0 for the affine VI variant.
    double curvature_bound() const { return curvature_; }

    /// Closed-form Lipschitz-type constants L1 = L2 = |P - Q|_2 / 2
    /// (|A|_2 / 2 for VI operators), floored at 1e-6.
    LipschitzConstants analytic_lipschitz() const;

private:
    Bifunction(Variant v, std::size_t n) : v_(std::move(v)), n_(n) {}

    Variant v_;
    std::size_t n_ = 0;
    double curvature_ = 0.0;
    double analytic_L_ = 0.0;
    std::optional<LipschitzConstants> lipschitz_;
};

/// Result of sampling-based Lipschitz estimation.
struct LipschitzEstimate {
    LipschitzConstants constants;  // grid value inflated by the safety factor
    double grid_value = 0.0;       // smallest grid candidate passing every triple
    double sampled_ratio = 0.0;    // worst observed (f(x,z) - f(x,y) - f(y,z)) / (|x-y|^2 + |y-z|^2)
    std::optional<LipschitzConstants> analytic;  // set when the closed form passes validation
    std::size_t triples = 0;
};

inline constexpr double kLipschitzFloor = 1e-6;
inline constexpr double kLipschitzSafety = 1.5;

/// Smallest L on a geometric grid [1e-6, 1e6] such that the Lipschitz-type
/// inequality with L1 = L2 = L holds on `samples` random triples from C,
/// inflated by 1.5. Throws ValidationError("A4") if no grid value works.
LipschitzEstimate estimate_lipschitz(const Bifunction& f, const ConvexSet& C, std::size_t samples, Rng& rng);

/// Largest violation of the Lipschitz-type inequality over the triples;
/// nonpositive when the constants hold.
double lipschitz_violation(const Bifunction& f, const LipschitzConstants& c, std::span<const Vector> xs,
                           std::span<const Vector> ys, std::span<const Vector> zs);

}  // namespace eqfix
