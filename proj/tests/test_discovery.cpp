#include <doctest.h>

#include "fixtures.hpp"
#include "plcmine/discovery.hpp"
#include "plcmine/errors.hpp"
#include "plcmine/replay.hpp"
#include "plcmine/scenario.hpp"

using namespace plcmine;
using fixtures::A;
using fixtures::B;
using fixtures::trace;

TEST_CASE("directly-follows counts") {
  const std::vector<Trace> log{trace({A, B}), trace({A, B})};
  const auto dfg = build_dfg(log);
  const std::string start(DirectlyFollowsGraph::kStart), end(DirectlyFollowsGraph::kEnd);
  CHECK(dfg.edges.size() == 3);
  CHECK(dfg.edges.at({start, A}) == 2);
  CHECK(dfg.edges.at({A, B}) == 2);
  CHECK(dfg.edges.at({B, end}) == 2);
  CHECK(dfg.start_counts.at(A) == 2);
  CHECK(dfg.end_counts.at(B) == 2);

  const std::vector<Trace> loop{trace({A, B, A, B})};
  CHECK(build_dfg(loop).edges.at({B, A}) == 1);
}

TEST_CASE("a two-activity sequence gives four places and three transitions") {
  const std::vector<Trace> log{trace({A, B})};
  const auto net = discover_net(log);
  CHECK(net.num_places() == 4);
  CHECK(net.num_transitions() == 3);
  int hidden = 0;
  for (const auto& t : net.transitions()) hidden += t.hidden();
  CHECK(hidden == 1);
  CHECK(net.transitions()[net.transition_index("t:" + A)].cls == TransitionClass::Input);
  CHECK(net.transitions()[net.transition_index("t:" + B)].cls == TransitionClass::Output);
  const auto r = replay_trace(net, log[0]);
  CHECK(r.reached_final);
  CHECK(r.missing_tokens == 0);
}

TEST_CASE("discovery rejects an empty log") {
  CHECK_THROWS_AS(discover_net(std::vector<Trace>{}), NoModelError);
}

TEST_CASE("edge filter keeps the strongest edges of every node") {
  std::vector<Trace> log;
  for (int i = 0; i < 9; ++i) log.push_back(trace({A, B}));
  log.push_back(trace({A, fixtures::C, B}));
  DiscoveryConfig cfg{0.5};
  const auto filtered = filter_dfg(build_dfg(log), cfg);
  CHECK(filtered.edges.count({A, B}) == 1);
  CHECK(filter_dfg(build_dfg(log), {}).edges.size() == 5);
  CHECK_THROWS(filter_dfg(build_dfg(log), DiscoveryConfig{1.5}));
}

TEST_CASE("scenario nets: sequential for C1, looping and isomorphic for C2") {
  auto mine = [](const char* name, std::uint64_t seed) {
    const auto spec = make_scenario(name, seed);
    const auto run = run_closed_loop(spec.program, spec.plant, spec.duration_s);
    const auto log = convert_io_log(run.io_log, spec);
    return std::pair{log, discover_from_log(log)};
  };
  const auto [log1, net1] = mine("scenario1", 42);
  CHECK(net1.num_transitions() == 9);  // eight activities and the end
  const auto enabled = enabled_transitions(net1, net1.initial_marking());
  REQUIRE(enabled.size() == 1);
  CHECK(net1.transitions()[enabled[0]].cls == TransitionClass::Input);

  const auto [log2, net2] = mine("scenario2", 42);
  const auto [log3, net3] = mine("scenario3", 42);
  CHECK(structurally_isomorphic(net2, net3));
  CHECK_FALSE(structurally_isomorphic(net1, net2));

  // Some activity is directly followed by itself again via a cycle of edges.
  const auto dfg2 = build_dfg(complete_traces(log2));
  std::map<std::string, std::set<std::string>> succ;
  for (const auto& [edge, n] : dfg2.edges) succ[edge.first].insert(edge.second);
  auto reachable = [&](const std::string& from) {
    std::set<std::string> seen;
    std::vector<std::string> stack(succ[from].begin(), succ[from].end());
    while (!stack.empty()) {
      auto a = stack.back();
      stack.pop_back();
      if (!seen.insert(a).second) continue;
      for (const auto& b : succ[a]) stack.push_back(b);
    }
    return seen;
  };
  bool loop = false;
  for (const auto& a : dfg2.activities) loop |= reachable(a).count(a) > 0;
  CHECK(loop);
}

TEST_CASE("isomorphism is reflexive and sensitive to arcs") {
  const auto net = fixtures::chain_net();
  CHECK(structurally_isomorphic(net, net));

  const LabeledPetriNet renamed({"q", "q_in", "q_out"},
                                {{"x", A, TransitionClass::Input}, {"y", B, TransitionClass::Output}},
                                {{"q_in", "x"}, {"x", "q"}, {"q", "y"}, {"y", "q_out"}},
                                {{"q_in", 1}}, {{"q_out", 1}});
  CHECK(structurally_isomorphic(net, renamed));

  const LabeledPetriNet extra_arc({"p", "p_in", "p_out"},
                                  {{"t:a", A, TransitionClass::Input}, {"t:b", B, TransitionClass::Output}},
                                  {{"p_in", "t:a"}, {"t:a", "p"}, {"p", "t:b"}, {"t:b", "p_out"},
                                   {"t:b", "p"}},
                                  {{"p_in", 1}}, {{"p_out", 1}});
  CHECK_FALSE(structurally_isomorphic(net, extra_arc));
}

TEST_CASE("discovery is deterministic") {
  const auto spec = make_scenario("scenario3", 8);
  const auto run = run_closed_loop(spec.program, spec.plant, spec.duration_s);
  const auto log = convert_io_log(run.io_log, spec);
  CHECK(discover_from_log(log) == discover_from_log(log));
  CHECK(dfg_to_dot(build_dfg(log)) == dfg_to_dot(build_dfg(log)));
}
