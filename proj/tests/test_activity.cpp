#include <doctest.h>

#include "plcmine/activity.hpp"
#include "plcmine/errors.hpp"

using namespace plcmine;

TEST_CASE("address class follows the %I/%Q prefix") {
  CHECK(class_of_address("%IX0.1") == SignalClass::Input);
  CHECK(class_of_address("%QX0.0") == SignalClass::Output);
  CHECK_THROWS_AS(class_of_address("%MX0.0"), WiringError);
  CHECK_THROWS_AS(class_of_address(""), WiringError);
}

TEST_CASE("components format and parse") {
  CHECK(format_component({"%IX0.1", false}) == "%IX0.1_false");
  CHECK(parse_component("%QX0.1_true") == Component{"%QX0.1", true});
  CHECK_THROWS_AS(parse_component("%QX0.1_maybe"), ParseError);
  CHECK_THROWS_AS(parse_component("%QX0.1"), ParseError);
}

TEST_CASE("merged activities are sorted by address") {
  CHECK(join_activity({{"%IX0.2", true}, {"%IX0.1", true}}) == "%IX0.1_true+%IX0.2_true");
  CHECK(canonicalize_activity("%QX0.1_false+%QX0.0_true") == "%QX0.0_true+%QX0.1_false");
  CHECK_THROWS(join_activity({{"%IX0.1", true}, {"%IX0.1", false}}));
}

TEST_CASE("component containment matches whole components only") {
  CHECK(activity_contains("%IX0.1_false+%IX0.2_false", "%IX0.1_false"));
  CHECK_FALSE(activity_contains("%IX0.1_true", "%IX0.1_false"));
  CHECK_FALSE(activity_contains("%IX0.10_false", "%IX0.1_false"));
}

TEST_CASE("mixed-class activities are rejected") {
  CHECK(class_of_activity("%QX0.0_true+%QX0.1_false") == SignalClass::Output);
  CHECK_THROWS_AS(class_of_activity("%IX0.0_true+%QX0.1_false"), DataError);
}
