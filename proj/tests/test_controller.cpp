#include <doctest.h>

#include "fixtures.hpp"
#include "plcmine/controller.hpp"
#include "plcmine/errors.hpp"
#include "plcmine/scenario.hpp"

using namespace plcmine;
using fixtures::A;
using fixtures::B;
using fixtures::C;

namespace {

std::shared_ptr<const LabeledPetriNet> shared(LabeledPetriNet net) {
  return std::make_shared<const LabeledPetriNet>(std::move(net));
}

// p_in -> a -> p -> c -> p_out: two inputs in a row.
LabeledPetriNet two_inputs() {
  return LabeledPetriNet({"p", "p_in", "p_out"},
                         {{"t:a", A, TransitionClass::Input}, {"t:c", C, TransitionClass::Input}},
                         {{"p_in", "t:a"}, {"t:a", "p"}, {"p", "t:c"}, {"t:c", "p_out"}},
                         {{"p_in", 1}}, {{"p_out", 1}});
}

// After a, both b and b2 (%Q) compete.
LabeledPetriNet competing_outputs() {
  const std::string B2 = "%QX0.1_true";
  return LabeledPetriNet({"p", "p_in", "p_out"},
                         {{"t:a", A, TransitionClass::Input},
                          {"t:b", B, TransitionClass::Output},
                          {"t:b2", B2, TransitionClass::Output}},
                         {{"p_in", "t:a"}, {"t:a", "p"}, {"p", "t:b"}, {"p", "t:b2"},
                          {"t:b", "p_out"}, {"t:b2", "p_out"}},
                         {{"p_in", 1}}, {{"p_out", 1}});
}

Observation observe(std::set<std::string> changes, double clock) {
  return {changes, changes, clock};
}

}  // namespace

TEST_CASE("enabled transitions are partitioned by class") {
  const auto net = fixtures::chain_net();
  auto sets = classify_enabled(net, net.initial_marking());
  CHECK(sets.inputs.size() == 1);
  CHECK(sets.outputs.empty());
  CHECK(classify_round(sets) == Decision::Rule1);

  const auto after = fire(net, net.initial_marking(), net.transition_index("t:a"));
  CHECK(classify_round(net, after) == Decision::Rule2);

  const auto comp = competing_outputs();
  CHECK(classify_round(comp, fire(comp, comp.initial_marking(), comp.transition_index("t:a"))) ==
        Decision::Rule3);
  CHECK(classify_round(net, net.final_marking()) == Decision::Idle);
}

TEST_CASE("Rule 1 fires on a matching input and emits nothing") {
  auto s = make_controller(shared(two_inputs()), nullptr);
  auto r = control_step(s, observe({A}, 0.1));
  CHECK(r.commands.empty());
  CHECK(r.state.rule_counts.r1 == 1);
  CHECK(r.state.violations == 0);
  CHECK(r.state.marking[r.state.net->place_index("p")] == 1);
}

TEST_CASE("Rule 2 emits the single enabled output in the same tick") {
  auto s = make_controller(shared(fixtures::chain_net()), nullptr);
  auto r = control_step(s, observe({A}, 0.1));
  CHECK(r.commands == std::map<std::string, bool>{{"%QX0.0", true}});
  CHECK(r.state.rule_counts.r2 == 1);
  CHECK(r.state.cycles == 1);
}

TEST_CASE("unexpected inputs are violations, fatal in strict mode") {
  auto s = make_controller(shared(two_inputs()), nullptr);
  auto r = control_step(s, observe({A}, 0.1));
  r = control_step(r.state, observe({"%IX0.1_true"}, 0.2));
  CHECK(r.state.violations == 1);
  CHECK(r.state.marking[r.state.net->place_index("p")] == 1);

  auto strict = make_controller(shared(two_inputs()), nullptr, ControllerOptions{true});
  strict = control_step(strict, observe({A}, 0.1)).state;
  CHECK_THROWS_AS(control_step(strict, observe({"%IX0.1_true"}, 0.2)), ValidationError);
}

TEST_CASE("Rule 3 needs a model") {
  auto s = make_controller(shared(competing_outputs()), nullptr);
  CHECK_THROWS_AS(control_step(s, observe({A}, 0.1)), ConfigurationError);
}

TEST_CASE("a long wait produces one liveness warning") {
  ControllerOptions opts;
  opts.liveness_wait_s = 1.0;
  auto s = make_controller(shared(two_inputs()), nullptr, opts);
  s = control_step(s, observe({A}, 0.1)).state;
  for (int i = 2; i < 40; ++i) s = control_step(s, observe({}, 0.1 * i)).state;
  long warnings = 0;
  for (const auto& line : s.log) warnings += line.rfind("liveness", 0) == 0;
  CHECK(warnings == 1);
  CHECK_FALSE(s.deadlocked);
}

TEST_CASE("scenario-1 controller answers the reset with the fill command") {
  const auto spec = make_scenario("scenario1");
  const auto run = run_closed_loop(spec.program, spec.plant, spec.duration_s);
  const auto net = discover_from_log(convert_io_log(run.io_log, spec));
  auto s = make_controller(shared(net), nullptr);
  const Observation obs{{"%IX0.1_false"}, {"%IX0.0_false", "%IX0.1_false", "%IX0.2_false"}, 0.1};
  const auto r = control_step(s, obs);
  CHECK(r.commands == std::map<std::string, bool>{{"%QX0.0", true}, {"%QX0.1", false}});
  CHECK(r.state.rule_counts.r3 == 0);
}

TEST_CASE("trajectory comparison") {
  const auto spec = make_scenario("scenario1", 42, 60.0);
  const auto run = run_closed_loop(spec.program, spec.plant, spec.duration_s);
  const auto cmp = compare_trajectories(run.trajectory, run.io_log, run.trajectory, run.io_log);
  CHECK(cmp.max_level_diff == 0.0);
  CHECK(cmp.event_sequence_equal);
  CHECK(cmp.switch_count_equal);
  for (auto d : cmp.switch_tick_diffs) CHECK(d == 0);

  const auto shorter = run_closed_loop(spec.program, spec.plant, 30.0);
  CHECK_THROWS_AS(compare_trajectories(run.trajectory, run.io_log, shorter.trajectory, shorter.io_log),
                  ComparisonError);
}

TEST_CASE("substituted run of zero length is empty") {
  const auto net = shared(fixtures::chain_net());
  const auto run = run_substituted(net, nullptr, PlantConfig::deterministic(), 0.0);
  CHECK(run.trajectory.empty());
  CHECK(run.io_log.empty());
}

TEST_CASE("validation refuses a net mined from other wiring") {
  const std::string other = "%IX1.0_true";
  const LabeledPetriNet net({"p", "p_in", "p_out"},
                            {{"t:x", other, TransitionClass::Input}, {"t:b", B, TransitionClass::Output}},
                            {{"p_in", "t:x"}, {"t:x", "p"}, {"p", "t:b"}, {"t:b", "p_out"}},
                            {{"p_in", 1}}, {{"p_out", 1}});
  CHECK_THROWS_AS(validate_substitution(make_scenario("scenario1", 42, 20.0), shared(net), nullptr),
                  ValidationError);
}
