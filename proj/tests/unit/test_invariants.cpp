#include "doctest.h"

#include "eqfix/errors.hpp"
#include "eqfix/invariants.hpp"

using namespace eqfix;

TEST_CASE("invariant names round-trip") {
    for (Invariant i : kAllInvariants) {
        CHECK(parse_invariant(to_string(i)) == i);
        CHECK(tolerance(i) >= 0.0);
    }
    CHECK_FALSE(parse_invariant("speed").has_value());
}

TEST_CASE("selections") {
    const auto all = InvariantSelection::parse("all");
    const auto none = InvariantSelection::parse("none");
    for (Invariant i : kAllInvariants) {
        CHECK(all.includes(i));
        CHECK_FALSE(none.includes(i));
    }
    CHECK(InvariantSelection::parse("").describe() == "none");
    const auto some = InvariantSelection::parse("monotone,armijo,monotone");
    CHECK(some.includes(Invariant::Monotone));
    CHECK(some.includes(Invariant::Armijo));
    CHECK_FALSE(some.includes(Invariant::Fejer));
    CHECK(some.describe() == "monotone,armijo");
    CHECK_THROWS_AS(InvariantSelection::parse("monotone,"), ParseError);
    CHECK_THROWS_AS(InvariantSelection::parse("fejer,nope"), ParseError);
}
