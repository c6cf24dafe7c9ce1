#pragma once

#include "eqfix/bifunction.hpp"
#include "eqfix/geometry.hpp"
#include "eqfix/mapping.hpp"

#include <optional>
#include <string>

namespace eqfix {

/// Find x in Sol(C, f) ∩ Fix(T), starting (and anchoring the hybrid
/// projection) at `start`.
struct ProblemInstance {
    std::string name;
    std::size_t dimension = 0;
    ConvexSet set;
    Bifunction f;
    FixedPointMap T;
    Vector start;
    std::optional<Vector> known_solution;  // a certified point of the solution set
    std::optional<LipschitzConstants> lipschitz;
};

}  // namespace eqfix
