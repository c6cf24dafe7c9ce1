#pragma once

#include "eqfix/problem.hpp"

#include <functional>
#include <string>
#include <vector>

namespace eqfix::testsupport {

enum class SetKind { Box, Ball, Simplex, BoxCut };
enum class MapKind { Identity, SubsetProjection, Contraction };

struct InstanceSpec {
    std::size_t n = 2;
    SetKind set = SetKind::Box;
    bool quadratic = false;
    MapKind map = MapKind::Identity;
    std::uint64_t seed = 0;
};

std::string describe(const InstanceSpec& spec);

/// Random monotone instance with a planted solution q: q = P_C(p) for a
/// random p, and the constant term of F is chosen so that -F(q) is a positive
/// multiple of p - q, a normal direction of C at q. T fixes q. The returned
/// instance has been through validate_problem.
ProblemInstance generate_instance(const InstanceSpec& spec);

/// 20 specs over n in {2, 5, 20}, all set kinds, both bifunction families
/// and all map kinds.
std::vector<InstanceSpec> suite_specs();

/// Quadratic instances on boxes with T = identity and no planted solution,
/// for comparison with an independent solver.
ProblemInstance quadratic_box_instance(std::size_t n, std::uint64_t seed);

/// A VI on [-2, 2]^2 whose solution set meets Fix(T) in a segment, so the
/// limit P_S(x^g) = (0.5, sqrt(0.75)) differs from the planted q = (0.5, 0).
ProblemInstance segment_instance();
Vector segment_instance_limit();

using VectorMap = std::function<Vector(const Vector&)>;

/// Korpelevich extragradient for VI(F, K) with a geometric step-size
/// decrease on stagnation. Independent of the library's solvers.
Vector extragradient_oracle(const VectorMap& F, const VectorMap& project, Vector x0, double tau,
                            std::size_t max_iters = 2'000'000);

/// min over samples y of f(x, y); >= -eps certifies x as an equilibrium on the sample.
double sampled_equilibrium_gap(const ProblemInstance& problem, const Vector& x, std::size_t samples,
                               std::uint64_t seed);

}  // namespace eqfix::testsupport
