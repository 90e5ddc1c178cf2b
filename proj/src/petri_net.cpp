#include "plcmine/petri_net.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "plcmine/activity.hpp"
#include "plcmine/errors.hpp"

namespace plcmine {

long Marking::total() const { return std::accumulate(tokens.begin(), tokens.end(), 0L); }

LabeledPetriNet::LabeledPetriNet(std::vector<std::string> places,
                                 std::vector<Transition> transitions, std::vector<Arc> arcs,
                                 const std::map<std::string, int>& initial,
                                 const std::map<std::string, int>& final_marking)
    : places_(std::move(places)), transitions_(std::move(transitions)), arcs_(std::move(arcs)) {
  std::sort(places_.begin(), places_.end());
  std::sort(transitions_.begin(), transitions_.end(),
            [](const Transition& a, const Transition& b) { return a.id < b.id; });
  std::sort(arcs_.begin(), arcs_.end());
  arcs_.erase(std::unique(arcs_.begin(), arcs_.end()), arcs_.end());

  if (std::adjacent_find(places_.begin(), places_.end()) != places_.end())
    throw InvariantError("duplicate place identifier");
  for (std::size_t i = 1; i < transitions_.size(); ++i)
    if (transitions_[i].id == transitions_[i - 1].id)
      throw InvariantError("duplicate transition identifier '" + transitions_[i].id + "'");
  for (const auto& t : transitions_) {
    if (std::binary_search(places_.begin(), places_.end(), t.id))
      throw InvariantError("identifier '" + t.id + "' used for a place and a transition");
    if (t.hidden() != (t.cls == TransitionClass::Hidden))
      throw InvariantError("transition '" + t.id + "' has inconsistent label and class");
    if (t.label) {
      const auto expected =
          class_of_activity(*t.label) == SignalClass::Input ? TransitionClass::Input : TransitionClass::Output;
      if (t.cls != expected)
        throw InvariantError("transition '" + t.id + "' class disagrees with its label's addresses");
    }
  }

  pre_.assign(transitions_.size(), {});
  post_.assign(transitions_.size(), {});
  producers_.assign(places_.size(), {});
  consumers_.assign(places_.size(), {});
  for (const auto& arc : arcs_) {
    const auto from_p = find_place(arc.from);
    const auto from_t = find_transition(arc.from);
    const auto to_p = find_place(arc.to);
    const auto to_t = find_transition(arc.to);
    if (from_p && to_t) {
      pre_[*to_t].push_back(*from_p);
      consumers_[*from_p].push_back(*to_t);
    } else if (from_t && to_p) {
      post_[*from_t].push_back(*to_p);
      producers_[*to_p].push_back(*from_t);
    } else {
      throw InvariantError("arc " + arc.from + " -> " + arc.to +
                           " does not connect a place and a transition of the net");
    }
  }
  initial_ = marking_from(initial);
  final_ = marking_from(final_marking);
}

std::optional<std::size_t> LabeledPetriNet::find_place(std::string_view id) const {
  const auto it = std::lower_bound(places_.begin(), places_.end(), id);
  if (it == places_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - places_.begin());
}

std::optional<std::size_t> LabeledPetriNet::find_transition(std::string_view id) const {
  const auto it = std::lower_bound(transitions_.begin(), transitions_.end(), id,
                                   [](const Transition& t, std::string_view v) { return t.id < v; });
  if (it == transitions_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - transitions_.begin());
}

std::size_t LabeledPetriNet::place_index(std::string_view id) const {
  if (auto p = find_place(id)) return *p;
  throw InvariantError("unknown place '" + std::string(id) + "'");
}

std::size_t LabeledPetriNet::transition_index(std::string_view id) const {
  if (auto t = find_transition(id)) return *t;
  throw InvariantError("unknown transition '" + std::string(id) + "'");
}

std::vector<std::size_t> LabeledPetriNet::transitions_labeled(std::string_view activity) const {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < transitions_.size(); ++t)
    if (transitions_[t].label && *transitions_[t].label == activity) out.push_back(t);
  return out;
}

Marking LabeledPetriNet::marking_from(const std::map<std::string, int>& tokens) const {
  Marking m(places_.size(), 0);
  for (const auto& [id, n] : tokens) {
    if (n < 0) throw InvariantError("negative token count for place '" + id + "'");
    m[place_index(id)] = n;
  }
  return m;
}

void check_marking(const LabeledPetriNet& net, const Marking& m) {
  if (m.size() != net.num_places())
    throw DimensionError("marking has " + std::to_string(m.size()) + " entries, net has " +
                         std::to_string(net.num_places()) + " places");
  for (int v : m.tokens)
    if (v < 0) throw DimensionError("marking has a negative entry");
}

bool is_enabled(const LabeledPetriNet& net, const Marking& m, std::size_t t) {
  const auto pre = net.preset(t);
  if (pre.empty()) return false;
  return std::all_of(pre.begin(), pre.end(), [&](std::size_t p) { return m[p] >= 1; });
}

std::vector<std::size_t> enabled_transitions(const LabeledPetriNet& net, const Marking& m) {
  check_marking(net, m);
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < net.num_transitions(); ++t)
    if (is_enabled(net, m, t)) out.push_back(t);
  return out;
}

Marking fire(const LabeledPetriNet& net, const Marking& m, std::size_t t) {
  check_marking(net, m);
  if (t >= net.num_transitions()) throw NotEnabledError("transition index out of range");
  if (!is_enabled(net, m, t))
    throw NotEnabledError("transition '" + net.transitions()[t].id + "' is not enabled");
  Marking next = m;
  for (auto p : net.preset(t)) --next[p];
  for (auto p : net.postset(t)) ++next[p];
  return next;
}

}  // namespace plcmine
