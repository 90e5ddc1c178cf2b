#include "plcmine/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "plcmine/errors.hpp"

namespace plcmine {

DirectlyFollowsGraph build_dfg(std::span<const Trace> traces) {
  DirectlyFollowsGraph g;
  const std::string start(DirectlyFollowsGraph::kStart), end(DirectlyFollowsGraph::kEnd);
  for (const auto& t : traces) {
    if (t.events.empty()) continue;
    std::string prev = start;
    for (const auto& e : t.events) {
      g.activities.insert(e.activity);
      ++g.edges[{prev, e.activity}];
      prev = e.activity;
    }
    ++g.edges[{prev, end}];
    ++g.start_counts[t.events.front().activity];
    ++g.end_counts[t.events.back().activity];
  }
  return g;
}

DirectlyFollowsGraph filter_dfg(const DirectlyFollowsGraph& dfg, const DiscoveryConfig& cfg) {
  if (cfg.edge_filter_percentile < 0.0 || cfg.edge_filter_percentile > 1.0)
    throw ConfigurationError("edge filter percentile must lie in [0, 1]");
  if (cfg.edge_filter_percentile == 0.0) return dfg;

  std::map<std::string, std::vector<std::pair<std::string, int>>> outgoing, incoming;
  for (const auto& [edge, f] : dfg.edges) {
    outgoing[edge.first].emplace_back(edge.second, f);
    incoming[edge.second].emplace_back(edge.first, f);
  }
  std::set<std::pair<std::string, std::string>> keep;
  for (auto& [src, outs] : outgoing) {
    std::vector<int> freqs;
    for (const auto& o : outs) freqs.push_back(o.second);
    std::sort(freqs.begin(), freqs.end());
    // nearest-rank percentile
    const auto rank = static_cast<std::size_t>(
        std::ceil(cfg.edge_filter_percentile * static_cast<double>(freqs.size())));
    const int threshold = freqs[rank == 0 ? 0 : rank - 1];
    const auto best = std::max_element(outs.begin(), outs.end(), [](const auto& a, const auto& b) {
      return a.second < b.second;
    });
    for (const auto& [dst, f] : outs)
      if (f >= threshold || dst == best->first) keep.insert({src, dst});
  }
  for (auto& [dst, ins] : incoming) {
    const auto best = std::max_element(ins.begin(), ins.end(), [](const auto& a, const auto& b) {
      return a.second < b.second;
    });
    keep.insert({best->first, dst});
  }

  DirectlyFollowsGraph out;
  out.activities = dfg.activities;
  for (const auto& [edge, f] : dfg.edges)
    if (keep.contains(edge)) out.edges[edge] = f;
  for (const auto& [edge, f] : out.edges) {
    if (edge.first == DirectlyFollowsGraph::kStart) out.start_counts[edge.second] = f;
    if (edge.second == DirectlyFollowsGraph::kEnd) out.end_counts[edge.first] = f;
  }
  return out;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

TransitionClass transition_class(const std::string& activity) {
  return class_of_activity(activity) == SignalClass::Input ? TransitionClass::Input
                                                           : TransitionClass::Output;
}

}  // namespace

LabeledPetriNet discover_net(std::span<const Trace> traces, const DiscoveryConfig& cfg) {
  const auto dfg = filter_dfg(build_dfg(traces), cfg);
  if (dfg.activities.empty()) throw NoModelError("cannot discover a net from an empty log");

  // Node layout: 0 = after(START); 1..n = after(a_i); n+1..2n = before(a_i).
  const std::vector<std::string> acts(dfg.activities.begin(), dfg.activities.end());
  const std::size_t n = acts.size();
  auto index_of = [&](const std::string& a) {
    return static_cast<std::size_t>(std::lower_bound(acts.begin(), acts.end(), a) - acts.begin());
  };
  auto after = [&](const std::string& a) {
    return a == DirectlyFollowsGraph::kStart ? std::size_t{0} : 1 + index_of(a);
  };
  auto before = [&](const std::string& a) { return 1 + n + index_of(a); };

  DisjointSets sets(1 + 2 * n);
  std::set<std::string> end_activities;
  for (const auto& [edge, f] : dfg.edges) {
    if (edge.second == DirectlyFollowsGraph::kEnd)
      end_activities.insert(edge.first);
    else
      sets.unite(after(edge.first), before(edge.second));
  }

  // Name every class by the activities whose completion feeds it.
  std::map<std::size_t, std::set<std::string>> feeders;
  for (std::size_t i = 0; i < n; ++i) feeders[sets.find(1 + i)].insert(acts[i]);
  const std::size_t start_root = sets.find(0);
  auto place_name = [&](std::size_t node) {
    const auto root = sets.find(node);
    if (root == start_root) return std::string("p_start");
    const auto it = feeders.find(root);
    if (it == feeders.end()) throw InvariantError("activity without a predecessor after filtering");
    std::string name = "p_after:";
    bool first = true;
    for (const auto& a : it->second) {
      if (!first) name += '|';
      name += a;
      first = false;
    }
    return name;
  };

  std::set<std::string> places{"p_start", "p_final"};
  std::vector<Transition> transitions;
  std::vector<Arc> arcs;
  for (const auto& a : acts) {
    const std::string tid = "t:" + a;
    transitions.push_back({tid, a, transition_class(a)});
    const auto in = place_name(before(a));
    const auto out = place_name(after(a));
    places.insert(in);
    places.insert(out);
    arcs.push_back({in, tid});
    arcs.push_back({tid, out});
  }
  std::set<std::string> end_places;
  for (const auto& a : end_activities) end_places.insert(place_name(after(a)));
  for (const auto& p : end_places) {
    const std::string tid = "tau:end:" + p;
    transitions.push_back({tid, std::nullopt, TransitionClass::Hidden});
    arcs.push_back({p, tid});
    arcs.push_back({tid, "p_final"});
  }

  return LabeledPetriNet(std::vector<std::string>(places.begin(), places.end()),
                         std::move(transitions), std::move(arcs), {{"p_start", 1}},
                         {{"p_final", 1}});
}

std::string dfg_to_dot(const DirectlyFollowsGraph& dfg) {
  std::ostringstream out;
  out << "digraph dfg {\n  rankdir=LR;\n";
  auto quote = [](const std::string& s) { return "\"" + s + "\""; };
  out << "  " << quote(std::string(DirectlyFollowsGraph::kStart)) << " [shape=circle];\n";
  out << "  " << quote(std::string(DirectlyFollowsGraph::kEnd)) << " [shape=doublecircle];\n";
  for (const auto& a : dfg.activities) out << "  " << quote(a) << " [shape=box];\n";
  for (const auto& [edge, f] : dfg.edges)
    out << "  " << quote(edge.first) << " -> " << quote(edge.second) << " [label=" << f << "];\n";
  out << "}\n";
  return out.str();
}

}  // namespace plcmine
