#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "plcmine/event_log.hpp"
#include "plcmine/petri_net.hpp"

namespace plcmine {

/// Depth bound for hidden-only searches during replay.
inline constexpr int kHiddenSearchDepth = 4;

struct FiredStep {
  std::size_t transition = 0;
  /// Index of the trace event this firing realises; empty for hidden routing.
  std::optional<std::size_t> event_index;

  friend bool operator==(const FiredStep&, const FiredStep&) = default;
};

struct ReplayResult {
  bool reached_final = false;
  std::vector<FiredStep> fired_sequence;
  int missing_tokens = 0;
  Marking end_marking;
};

/// Shortest sequence of hidden firings (breadth first, canonical transition
/// order, at most `max_depth` firings) after which `goal` holds.
std::optional<std::vector<std::size_t>> hidden_path(
    const LabeledPetriNet& net, const Marking& from,
    const std::function<bool(const Marking&)>& goal, int max_depth = kHiddenSearchDepth);

/// Token replay of one trace. Each event fires a transition carrying its
/// activity; hidden transitions are fired first when that enables it, and
/// missing tokens are force-inserted (and counted) otherwise. After the last
/// event a hidden path to the final marking is taken if one exists.
///
/// Throws UnknownActivityError when an event's activity labels no transition.
ReplayResult replay_trace(const LabeledPetriNet& net, const Trace& trace);

}  // namespace plcmine
