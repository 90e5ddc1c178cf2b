#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>

#include "plcmine/event_log.hpp"
#include "plcmine/petri_net.hpp"

namespace plcmine {

struct DirectlyFollowsGraph {
  static constexpr std::string_view kStart = "START";
  static constexpr std::string_view kEnd = "END";

  std::set<std::string> activities;
  /// (from, to) -> frequency, START and END included as endpoints.
  std::map<std::pair<std::string, std::string>, int> edges;
  std::map<std::string, int> start_counts;
  std::map<std::string, int> end_counts;
};

DirectlyFollowsGraph build_dfg(std::span<const Trace> traces);
inline DirectlyFollowsGraph build_dfg(const EventLog& log) { return build_dfg(log.traces); }

struct DiscoveryConfig {
  /// Per source node, outgoing edges whose frequency is below this percentile
  /// of the node's outgoing frequencies are dropped. The most frequent
  /// outgoing edge of every node, and the most frequent incoming edge of every
  /// activity, always survive.
  double edge_filter_percentile = 0.0;
};

DirectlyFollowsGraph filter_dfg(const DirectlyFollowsGraph& dfg, const DiscoveryConfig& cfg);

/// XOR-only state-machine synthesis from the (filtered) DFG.
///
/// Every activity gets one labeled transition `t:<activity>` classed by its
/// address prefix. For every retained edge a -> b the place after `a` and the
/// place before `b` are identified (union-find), so each labeled transition
/// has exactly one input and one output place. START's successor place is
/// `p_start` and carries the initial token; each place reached by an
/// end-marked activity routes through a hidden `tau:end:<place>` transition
/// into `p_final`, which carries the final token.
///
/// Throws NoModelError on an empty log.
LabeledPetriNet discover_net(std::span<const Trace> traces, const DiscoveryConfig& cfg = {});
inline LabeledPetriNet discover_net(const EventLog& log, const DiscoveryConfig& cfg = {}) {
  return discover_net(log.traces, cfg);
}

std::string dfg_to_dot(const DirectlyFollowsGraph& dfg);

/// Label/class-preserving bijection on transitions plus marking-preserving
/// bijection on places that maps arcs onto arcs.
bool structurally_isomorphic(const LabeledPetriNet& a, const LabeledPetriNet& b);

}  // namespace plcmine
