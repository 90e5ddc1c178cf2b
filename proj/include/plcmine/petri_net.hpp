#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace plcmine {

/// Token counts, one entry per place in the net's canonical place order.
struct Marking {
  std::vector<int> tokens;

  Marking() = default;
  explicit Marking(std::vector<int> t) : tokens(std::move(t)) {}
  Marking(std::size_t places, int fill) : tokens(places, fill) {}

  std::size_t size() const { return tokens.size(); }
  int& operator[](std::size_t i) { return tokens[i]; }
  int operator[](std::size_t i) const { return tokens[i]; }
  long total() const;

  friend bool operator==(const Marking&, const Marking&) = default;
  friend auto operator<=>(const Marking&, const Marking&) = default;
};

/// Class map value for a transition: %I, %Q, or hidden (no label).
enum class TransitionClass { Input, Output, Hidden };

struct Transition {
  std::string id;
  std::optional<std::string> label;
  TransitionClass cls = TransitionClass::Hidden;

  bool hidden() const { return !label.has_value(); }
  friend bool operator==(const Transition&, const Transition&) = default;
};

struct Arc {
  std::string from;
  std::string to;
  friend auto operator<=>(const Arc&, const Arc&) = default;
};

/// Ordinary (unit arc weight) Petri net with a label map and a %I/%Q class map.
///
/// Places and transitions are kept sorted by identifier, which fixes the index
/// order used by every marking vector. Construction validates that arcs are
/// bipartite, identifiers are unique, and that labels and classes agree
/// (hidden <=> no class).
class LabeledPetriNet {
 public:
  LabeledPetriNet() = default;
  LabeledPetriNet(std::vector<std::string> places, std::vector<Transition> transitions,
                  std::vector<Arc> arcs, const std::map<std::string, int>& initial,
                  const std::map<std::string, int>& final_marking);

  const std::vector<std::string>& places() const { return places_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const Marking& initial_marking() const { return initial_; }
  const Marking& final_marking() const { return final_; }

  std::size_t num_places() const { return places_.size(); }
  std::size_t num_transitions() const { return transitions_.size(); }

  std::optional<std::size_t> find_place(std::string_view id) const;
  std::optional<std::size_t> find_transition(std::string_view id) const;
  std::size_t place_index(std::string_view id) const;
  std::size_t transition_index(std::string_view id) const;

  /// Transitions whose label equals `activity`, in canonical order.
  std::vector<std::size_t> transitions_labeled(std::string_view activity) const;

  std::span<const std::size_t> preset(std::size_t t) const { return pre_[t]; }
  std::span<const std::size_t> postset(std::size_t t) const { return post_[t]; }
  std::span<const std::size_t> place_producers(std::size_t p) const { return producers_[p]; }
  std::span<const std::size_t> place_consumers(std::size_t p) const { return consumers_[p]; }

  /// Builds a marking from place id -> tokens; unknown ids throw.
  Marking marking_from(const std::map<std::string, int>& tokens) const;

  friend bool operator==(const LabeledPetriNet& a, const LabeledPetriNet& b) {
    return a.places_ == b.places_ && a.transitions_ == b.transitions_ && a.arcs_ == b.arcs_ &&
           a.initial_ == b.initial_ && a.final_ == b.final_;
  }

 private:
  std::vector<std::string> places_;
  std::vector<Transition> transitions_;
  std::vector<Arc> arcs_;
  Marking initial_;
  Marking final_;
  std::vector<std::vector<std::size_t>> pre_, post_;
  std::vector<std::vector<std::size_t>> producers_, consumers_;
};

/// Throws DimensionError unless `m` has one non-negative entry per place.
void check_marking(const LabeledPetriNet& net, const Marking& m);

bool is_enabled(const LabeledPetriNet& net, const Marking& m, std::size_t t);

/// Transitions with a non-empty preset whose input places all hold a token.
std::vector<std::size_t> enabled_transitions(const LabeledPetriNet& net, const Marking& m);

/// Consumes one token from every input place of `t`, produces one in every
/// output place. Throws NotEnabledError when `t` is not enabled.
Marking fire(const LabeledPetriNet& net, const Marking& m, std::size_t t);

}  // namespace plcmine
