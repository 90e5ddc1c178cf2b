#include "plcmine/replay.hpp"

#include <deque>
#include <set>

#include "plcmine/errors.hpp"

namespace plcmine {

std::optional<std::vector<std::size_t>> hidden_path(
    const LabeledPetriNet& net, const Marking& from,
    const std::function<bool(const Marking&)>& goal, int max_depth) {
  struct Node {
    Marking marking;
    std::vector<std::size_t> path;
  };
  std::deque<Node> queue{{from, {}}};
  std::set<Marking> seen{from};
  while (!queue.empty()) {
    Node node = std::move(queue.front());
    queue.pop_front();
    if (goal(node.marking)) return node.path;
    if (static_cast<int>(node.path.size()) >= max_depth) continue;
    for (auto t : enabled_transitions(net, node.marking)) {
      if (!net.transitions()[t].hidden()) continue;
      Marking next = fire(net, node.marking, t);
      if (!seen.insert(next).second) continue;
      auto path = node.path;
      path.push_back(t);
      queue.push_back({std::move(next), std::move(path)});
    }
  }
  return std::nullopt;
}

ReplayResult replay_trace(const LabeledPetriNet& net, const Trace& trace) {
  ReplayResult result;
  Marking m = net.initial_marking();

  for (std::size_t k = 0; k < trace.events.size(); ++k) {
    const auto& activity = trace.events[k].activity;
    const auto candidates = net.transitions_labeled(activity);
    if (candidates.empty())
      throw UnknownActivityError("no transition is labeled '" + activity + "'");

    std::optional<std::size_t> chosen;
    for (auto t : candidates)
      if (is_enabled(net, m, t)) {
        chosen = t;
        break;
      }

    if (!chosen) {
      std::optional<std::vector<std::size_t>> best;
      std::size_t best_t = 0;
      for (auto t : candidates) {
        auto path = hidden_path(net, m, [&](const Marking& x) { return is_enabled(net, x, t); });
        if (path && (!best || path->size() < best->size())) {
          best = std::move(path);
          best_t = t;
        }
      }
      if (best) {
        for (auto h : *best) {
          m = fire(net, m, h);
          result.fired_sequence.push_back({h, std::nullopt});
        }
        chosen = best_t;
      }
    }

    if (!chosen) {
      chosen = candidates.front();
      for (auto p : net.preset(*chosen))
        if (m[p] == 0) {
          m[p] = 1;
          ++result.missing_tokens;
        }
      // A transition without input places can never be enabled.
      if (net.preset(*chosen).empty())
        throw NotEnabledError("transition '" + activity + "' has no input places");
    }

    m = fire(net, m, *chosen);
    result.fired_sequence.push_back({*chosen, k});
  }

  if (m != net.final_marking()) {
    const auto& target = net.final_marking();
    if (auto path = hidden_path(net, m, [&](const Marking& x) { return x == target; })) {
      for (auto h : *path) {
        m = fire(net, m, h);
        result.fired_sequence.push_back({h, std::nullopt});
      }
    }
  }
  result.reached_final = m == net.final_marking();
  result.end_marking = std::move(m);
  return result;
}

}  // namespace plcmine
