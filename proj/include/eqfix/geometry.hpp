#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <random>
#include <span>
#include <variant>
#include <vector>

namespace eqfix {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Tolerances for iterative (Dykstra) projections.
struct ProjectionTolerances {
    double tol_proj = 1e-10;  // change of the iterate over one full cycle
    double tol_feas = 1e-9;   // violation of any single member
    std::size_t max_iters = 10'000;
};

/// {x : <normal, x> <= offset}. A zero normal with offset >= 0 encodes the
/// whole space.
struct Halfspace {
    Vector normal;
    double offset = 0.0;

    static Halfspace whole_space(std::size_t n) { return {Vector::Zero(static_cast<Eigen::Index>(n)), 0.0}; }

    bool is_whole_space() const { return normal.isZero(0.0) && offset >= 0.0; }
    /// <normal, x> - offset; nonpositive inside.
    double residual(const Vector& x) const { return normal.dot(x) - offset; }
};

struct Box {
    Vector lower;
    Vector upper;
};

struct Ball {
    Vector center;
    double radius = 1.0;
};

/// {x >= 0 : sum(x) = scale}.
struct Simplex {
    std::size_t dim = 0;
    double scale = 1.0;
};

class ConvexSet;

struct Intersection {
    std::vector<ConvexSet> members;
    Vector interior_point;
};

/// A closed convex set with a computable metric projection.
class ConvexSet {
public:
    using Variant = std::variant<Box, Ball, Halfspace, Simplex, Intersection>;

    // Checked factories; each throws ValidationError on a violated invariant.
    static ConvexSet box(Vector lower, Vector upper);
    static ConvexSet ball(Vector center, double radius);
    static ConvexSet halfspace(Vector normal, double offset);
    static ConvexSet whole_space(std::size_t n);
    static ConvexSet simplex(std::size_t n, double scale = 1.0);
    /// `interior_point` must lie in every member (to tol_feas).
    static ConvexSet intersection(std::vector<ConvexSet> members, Vector interior_point);

    std::size_t dimension() const;
    const Variant& variant() const { return v_; }
    bool is_exact() const { return !std::holds_alternative<Intersection>(v_); }
    bool is_bounded() const;

private:
    explicit ConvexSet(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

/// Metric projection onto `set`. Closed form for every variant except
/// Intersection, which runs Dykstra and throws EmptyIntersection when it
/// fails to converge.
Vector project(const ConvexSet& set, const Vector& x, const ProjectionTolerances& tol = {});

/// Dykstra's cyclic projection onto the intersection of `members`.
/// Throws NoConvergence if the tolerances are not met within max_iters.
Vector project_intersection_dykstra(std::span<const ConvexSet> members, const Vector& x,
                                    const ProjectionTolerances& tol = {});

/// Projection onto {p in base : <a, p> <= b for each cut}. Halfspace members
/// of `base` join the cuts; what remains must be at most one exact set, else
/// this is plain Dykstra. Solves the dual over the cut multipliers with a
/// projected Newton method, which stays accurate when the cuts meet at a
/// small angle. Falls back to Dykstra if Newton stalls.
Vector project_with_cuts(const ConvexSet& base, std::span<const Halfspace> cuts, const Vector& x,
                         const ProjectionTolerances& tol = {});

// Closed forms for the individual variants.
Vector project_halfspace(const Halfspace& h, const Vector& x);
Vector project_box(const Box& b, const Vector& x);
Vector project_ball(const Ball& b, const Vector& x);
/// Sort-and-threshold projection onto {x >= 0, sum x = scale}.
Vector project_simplex(const Vector& x, double scale);

/// Largest constraint violation of x; zero inside. For exact variants this
/// is the Euclidean distance to the set.
double infeasibility(const ConvexSet& set, const Vector& x);
bool contains(const ConvexSet& set, const Vector& x, double tol);

/// Checks p = P_set(x) through the variational inequality
/// <x - p, y - p> <= tol_vi for each probe y, and p in set to tol_feas.
/// Probes are projected into the set first.
bool check_projection_optimality(const ConvexSet& set, const Vector& x, const Vector& p,
                                 std::span<const Vector> probes, double tol_vi = 1e-10,
                                 double tol_feas = 1e-9);

/// Random points of `set`. Bounded variants are sampled uniformly (simplex:
/// flat Dirichlet); unbounded ones from a Gaussian cloud projected back.
Vector sample_point(const ConvexSet& set, Rng& rng);

/// Extreme points used as adversarial probes: box vertices (all of them for
/// n <= 10, otherwise `limit` random ones), points on a ball's sphere,
/// simplex vertices. Empty for halfspaces.
std::vector<Vector> extreme_points(const ConvexSet& set, Rng& rng, std::size_t limit = 1024);

/// `count` sample points, the first min(count/4, #extremes) of which are extremes.
std::vector<Vector> sample_points(const ConvexSet& set, std::size_t count, Rng& rng);

}  // namespace eqfix
