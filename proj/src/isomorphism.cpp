#include <algorithm>
#include <map>
#include <set>

#include "plcmine/discovery.hpp"

namespace plcmine {

namespace {

// Nodes 0..P-1 are places, P..P+T-1 transitions.
struct Graph {
  std::size_t places = 0;
  std::vector<std::string> seed;  // initial colour
  std::vector<std::vector<std::size_t>> succ, pred;
  std::set<std::pair<std::size_t, std::size_t>> arcs;
};

Graph to_graph(const LabeledPetriNet& net) {
  Graph g;
  g.places = net.num_places();
  const std::size_t n = net.num_places() + net.num_transitions();
  g.succ.assign(n, {});
  g.pred.assign(n, {});
  for (std::size_t p = 0; p < net.num_places(); ++p)
    g.seed.push_back("P" + std::to_string(net.initial_marking()[p]) + "/" +
                     std::to_string(net.final_marking()[p]));
  for (const auto& t : net.transitions()) {
    std::string c = t.hidden() ? "H" : "L" + *t.label;
    c += t.cls == TransitionClass::Input ? "#I" : t.cls == TransitionClass::Output ? "#Q" : "#_";
    g.seed.push_back(c);
  }
  for (std::size_t t = 0; t < net.num_transitions(); ++t) {
    const auto tn = g.places + t;
    for (auto p : net.preset(t)) {
      g.succ[p].push_back(tn);
      g.pred[tn].push_back(p);
      g.arcs.insert({p, tn});
    }
    for (auto p : net.postset(t)) {
      g.succ[tn].push_back(p);
      g.pred[p].push_back(tn);
      g.arcs.insert({tn, p});
    }
  }
  return g;
}

// Joint colour refinement so colours of both graphs are comparable.
std::pair<std::vector<int>, std::vector<int>> refine(const Graph& a, const Graph& b) {
  std::map<std::string, int> dict;
  auto intern = [&](const std::string& s) {
    return dict.emplace(s, static_cast<int>(dict.size())).first->second;
  };
  std::vector<int> ca, cb;
  for (const auto& s : a.seed) ca.push_back(intern(s));
  for (const auto& s : b.seed) cb.push_back(intern(s));

  auto step = [&](const Graph& g, const std::vector<int>& c) {
    std::vector<std::string> sig(c.size());
    for (std::size_t v = 0; v < c.size(); ++v) {
      std::vector<int> in, out;
      for (auto u : g.pred[v]) in.push_back(c[u]);
      for (auto u : g.succ[v]) out.push_back(c[u]);
      std::sort(in.begin(), in.end());
      std::sort(out.begin(), out.end());
      std::string s = std::to_string(c[v]) + "|";
      for (int x : in) s += std::to_string(x) + ",";
      s += "|";
      for (int x : out) s += std::to_string(x) + ",";
      sig[v] = std::move(s);
    }
    return sig;
  };

  std::size_t classes = 0;
  for (std::size_t round = 0; round <= ca.size() + 1; ++round) {
    const auto sa = step(a, ca), sb = step(b, cb);
    dict.clear();
    std::vector<int> na, nb;
    for (const auto& s : sa) na.push_back(intern(s));
    for (const auto& s : sb) nb.push_back(intern(s));
    ca = std::move(na);
    cb = std::move(nb);
    if (dict.size() == classes) break;
    classes = dict.size();
  }
  return {ca, cb};
}

class Matcher {
 public:
  Matcher(const Graph& a, const Graph& b, std::vector<int> ca, std::vector<int> cb)
      : a_(a), b_(b), ca_(std::move(ca)), cb_(std::move(cb)), map_(ca_.size(), kNone),
        used_(cb_.size(), false) {
    order_.resize(ca_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    // Rare colours first keeps the search narrow.
    std::map<int, int> freq;
    for (int c : ca_) ++freq[c];
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t x, std::size_t y) { return freq[ca_[x]] < freq[ca_[y]]; });
  }

  bool solve(std::size_t depth = 0) {
    if (depth == order_.size()) return true;
    const auto v = order_[depth];
    for (std::size_t w = 0; w < cb_.size(); ++w) {
      if (used_[w] || cb_[w] != ca_[v] || (v < a_.places) != (w < b_.places)) continue;
      if (!consistent(v, w)) continue;
      map_[v] = w;
      used_[w] = true;
      if (solve(depth + 1)) return true;
      map_[v] = kNone;
      used_[w] = false;
    }
    return false;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  bool consistent(std::size_t v, std::size_t w) const {
    for (std::size_t u = 0; u < map_.size(); ++u) {
      if (map_[u] == kNone) continue;
      const auto x = map_[u];
      if (a_.arcs.contains({v, u}) != b_.arcs.contains({w, x})) return false;
      if (a_.arcs.contains({u, v}) != b_.arcs.contains({x, w})) return false;
    }
    return true;
  }

  const Graph& a_;
  const Graph& b_;
  std::vector<int> ca_, cb_;
  std::vector<std::size_t> map_;
  std::vector<bool> used_;
  std::vector<std::size_t> order_;
};

}  // namespace

bool structurally_isomorphic(const LabeledPetriNet& a, const LabeledPetriNet& b) {
  if (a.num_places() != b.num_places() || a.num_transitions() != b.num_transitions() ||
      a.arcs().size() != b.arcs().size())
    return false;
  const auto ga = to_graph(a), gb = to_graph(b);
  auto [ca, cb] = refine(ga, gb);
  auto sa = ca, sb = cb;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  if (sa != sb) return false;
  // Self-loop arcs (u, u) cannot occur in a bipartite net, so pairwise checks
  // in the matcher cover every arc.
  return Matcher(ga, gb, std::move(ca), std::move(cb)).solve();
}

}  // namespace plcmine
