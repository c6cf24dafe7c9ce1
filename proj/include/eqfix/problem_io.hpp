#pragma once

#include "eqfix/problem.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace eqfix {

/// Problem file layout (JSON):
///
///   {
///     "name": "optional label",
///     "dimension": 2,
///     "sets":     { "<id>": <set>, ... },          optional registry
///     "matrices": { "<id>": [[...], ...], ... },   optional, row-major
///     "vectors":  { "<id>": [...], ... },          optional
///     "set": <set> | "<set-id>",
///     "f":   "vi:identity" | "vi:rotation:<theta>" | "vi:affine:<matrix-id>[:<vector-id>]"
///            | {"type": "vi", "operator": "identity" | "rotation" | "affine", "theta", "A", "b"}
///            | {"type": "quadratic", "P": <matrix>, "Q": <matrix>, "q": <vector>},
///     "T":   "identity" | "scaling:<c>" | "project:<set-id>" | "affine:<matrix-id>[:<vector-id>]"
///            | {"type": "identity" | "scaling" | "project" | "affine", "c", "set", "A", "b"},
///     "hybrid_params": [alpha, beta, gamma, delta]      optional
///     "start": [...],                                    optional, defaults to P_C(0)
///     "known_solution": [...],                           optional
///     "lipschitz": {"L1": ..., "L2": ...}                optional
///   }
///
/// <set> is {"type": "box", "lower", "upper"} | {"type": "ball", "center", "radius"}
///   | {"type": "halfspace", "normal", "offset"} | {"type": "whole_space"}
///   | {"type": "simplex", "scale"} | {"type": "intersection", "members": [<set>|id...], "interior_point"}.
/// <matrix> and <vector> are inline arrays or registry ids.

/// Builds the instance without checking modelling assumptions. Mapping
/// parameters (|c| <= 1, |A| <= 1) are not enforced here either, so invalid
/// maps can still be certified. Throws ParseError.
ProblemInstance parse_problem(const nlohmann::json& doc);

/// Parses JSON text; syntax errors carry the line number.
nlohmann::json parse_json_text(const std::string& text);
nlohmann::json read_json_file(const std::filesystem::path& path);

struct ValidationReport {
    std::string lipschitz_source;  // "file", "analytic" or "estimated"
    std::optional<HybridParams> hybrid;
    double self_map_violation = 0.0;
};

/// Checks convexity in y, pseudomonotonicity at the known solution,
/// Lipschitz-type constants (filling them in when absent), the mapping's
/// range, self-map property and hybrid certification, and the known solution
/// itself. Throws ValidationError labelled "A2", "A3", "A4", "A5",
/// "start" or "known_solution" respectively.
ValidationReport validate_problem(ProblemInstance& problem, std::uint64_t seed);

/// parse_problem + validate_problem.
ProblemInstance load_problem(const std::filesystem::path& path, std::uint64_t seed = 0,
                             ValidationReport* report = nullptr);

nlohmann::json to_json(const Vector& v);

}  // namespace eqfix
