#include "doctest.h"

#include "eqfix/errors.hpp"
#include "eqfix/problem_io.hpp"

#include <string>

using namespace eqfix;

namespace {

ProblemInstance parse(const std::string& text) { return parse_problem(parse_json_text(text)); }

ProblemInstance load(const std::string& text, ValidationReport* report = nullptr) {
    auto p = parse(text);
    const auto r = validate_problem(p, 0);
    if (report) *report = r;
    return p;
}

std::string assumption_of(const std::string& text) {
    try {
        load(text);
    } catch (const ValidationError& e) {
        return e.assumption();
    }
    return "";
}

const char* kBall = R"({
  "dimension": 2,
  "set": {"type": "ball", "center": [0, 0], "radius": 1},
  "f": "vi:identity",
  "T": "identity"
})";

}  // namespace

TEST_CASE("minimal file gets defaults") {
    ValidationReport report;
    const auto p = load(kBall, &report);
    CHECK(p.dimension == 2);
    CHECK(p.start.isZero());
    CHECK_FALSE(p.known_solution.has_value());
    REQUIRE(p.lipschitz.has_value());
    CHECK(p.lipschitz->L1 == doctest::Approx(0.5));
    CHECK(report.lipschitz_source == "analytic");
    REQUIRE(p.T.hybrid_params().has_value());
    CHECK(p.T.hybrid_params()->admissible());
    CHECK(report.self_map_violation <= 1e-15);
}

TEST_CASE("start defaults to the projection of the origin") {
    const auto p = load(R"({
      "dimension": 2,
      "set": {"type": "box", "lower": [1, -3], "upper": [2, -1]},
      "f": "vi:identity", "T": "identity"})");
    CHECK(p.start(0) == 1.0);
    CHECK(p.start(1) == -1.0);
}

TEST_CASE("registries, string forms and intersections") {
    const auto p = load(R"({
      "dimension": 2,
      "sets": {"B": {"type": "ball", "center": [0, 0], "radius": 2},
               "H": {"type": "halfspace", "normal": [1, 0], "offset": 1}},
      "matrices": {"A": [[1, 2], [-2, 1]]},
      "vectors": {"b": [0.5, 0]},
      "set": {"type": "intersection", "members": ["B", "H"], "interior_point": [0, 0]},
      "f": "vi:affine:A:b",
      "T": "project:B",
      "hybrid_params": [1, 0, -1, 0],
      "lipschitz": {"L1": 2, "L2": 2}
    })");
    CHECK_FALSE(p.set.is_exact());
    CHECK(p.f.is_vi());
    Vector x(2);
    x << 1, 1;
    Vector Fx(2);
    Fx << 3.5, -1;
    CHECK((apply_operator(std::get<VIInduced>(p.f.variant()).F, x) - Fx).norm() < 1e-15);
    CHECK(p.lipschitz->L1 == 2.0);
}

TEST_CASE("quadratic and object forms") {
    const auto p = load(R"({
      "dimension": 2,
      "set": {"type": "simplex", "scale": 1},
      "f": {"type": "quadratic", "P": [[2, 0], [0, 2]], "Q": [[1, 0], [0, 1]], "q": [0, 0]},
      "T": {"type": "scaling", "c": 1},
      "hybrid_params": {"alpha": 1, "beta": 0, "gamma": -1, "delta": 0}
    })");
    CHECK_FALSE(p.f.is_vi());
    CHECK(std::holds_alternative<Simplex>(p.set.variant()));
}

TEST_CASE("syntax errors report the line") {
    try {
        parse_json_text("{\n  \"dimension\": 2,\n  \"set\": ]\n}");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        REQUIRE(e.line().has_value());
        CHECK(*e.line() == 3);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        CHECK(e.exit_code() == ExitCode::Parse);
    }
}

TEST_CASE("structural errors name the field") {
    auto field_of = [](const std::string& text) {
        try {
            parse(text);
        } catch (const ParseError& e) {
            return e.field();
        }
        return std::string("<none>");
    };
    CHECK(field_of(R"({"set": {"type": "whole_space"}, "f": "vi:identity", "T": "identity"})") == "dimension");
    CHECK(field_of(R"({"dimension": 0})") == "dimension");
    CHECK(field_of(R"({"dimension": 1, "set": {"type": "cone"}, "f": "vi:identity", "T": "identity"})") == "set.type");
    CHECK(field_of(R"({"dimension": 1, "set": "missing", "f": "vi:identity", "T": "identity"})") == "set");
    CHECK(field_of(R"({"dimension": 1, "set": {"type": "whole_space"}, "f": "vi:spin", "T": "identity"})") == "f");
    CHECK(field_of(R"({"dimension": 1, "set": {"type": "whole_space"}, "f": "vi:identity", "T": "warp"})") == "T");
    CHECK(field_of(R"({"dimension": 1, "set": {"type": "whole_space"}, "f": "vi:identity", "T": "scaling:x"})") == "T");
    CHECK(field_of(R"({"dimension": 1, "set": {"type": "ball", "center": [0], "radius": "1"}, "f": "vi:identity", "T": "identity"})") ==
          "set.radius");
    CHECK(field_of(R"([1, 2])") == "");
}

TEST_CASE("lengths must match the dimension") {
    CHECK_THROWS_AS(parse(R"({"dimension": 2, "set": {"type": "ball", "center": [0], "radius": 1},
                              "f": "vi:identity", "T": "identity"})"),
                    DimensionMismatch);
    CHECK_THROWS_AS(parse(R"({"dimension": 2, "set": {"type": "whole_space"}, "f": "vi:identity",
                              "T": "identity", "start": [1, 2, 3]})"),
                    DimensionMismatch);
    CHECK_THROWS_AS(parse(R"({"dimension": 2, "set": {"type": "whole_space"},
                              "f": {"type": "quadratic", "P": [[1, 0]], "Q": [[1, 0], [0, 1]], "q": [0, 0]},
                              "T": "identity"})"),
                    DimensionMismatch);
}

TEST_CASE("assumption failures are named") {
    const std::string head = R"({"dimension": 2, "set": {"type": "box", "lower": [-1, -1], "upper": [1, 1]}, )";
    CHECK(assumption_of(head + R"("f": {"type": "quadratic", "P": [[1, 0], [0, 1]], "Q": [[1, 0], [0, -1]], "q": [0, 0]},
                                  "T": "identity"})") == "A2");
    CHECK(assumption_of(head + R"("f": "vi:identity", "T": "scaling:2"})") == "A5");
    CHECK(assumption_of(head + R"("f": "vi:identity", "T": "identity", "hybrid_params": [1, 0, -2, 0]})") == "A5");
    CHECK(assumption_of(head + R"("f": "vi:identity", "T": "identity", "lipschitz": {"L1": 0.01, "L2": 0.01}})") == "A4");
    CHECK(assumption_of(head + R"("f": "vi:identity", "T": "identity", "start": [2, 0]})") == "start");
    CHECK(assumption_of(head + R"("f": "vi:identity", "T": "identity", "known_solution": [0.5, 0]})") ==
          "known_solution");
    CHECK(assumption_of(head + R"("f": "vi:identity", "T": "scaling:0.5", "known_solution": [0, 0]})") == "");
    CHECK(assumption_of(head + R"("f": "vi:identity", "T": "scaling:0.5", "known_solution": [3, 0]})") ==
          "known_solution");
    // A monotone-but-wrong point: F = -identity is not pseudomonotone at 0.
    CHECK(assumption_of(head + R"("matrices": {"M": [[-1, 0], [0, -1]]}, "f": "vi:affine:M", "T": "identity",
                                  "known_solution": [0, 0]})") == "A3");
}

TEST_CASE("vectors serialize as arrays") {
    Vector v(3);
    v << 1.5, -2, 0;
    CHECK(to_json(v).dump() == "[1.5,-2.0,0.0]");
}
