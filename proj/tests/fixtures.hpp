#pragma once

#include <string>
#include <vector>

#include "plcmine/event_log.hpp"
#include "plcmine/petri_net.hpp"

namespace fixtures {

// Short names for real activity strings; discovery derives classes from addresses.
inline const std::string A = "%IX0.0_true";
inline const std::string B = "%QX0.0_true";
inline const std::string C = "%IX0.2_true";
inline const std::string R = "%IX0.1_false";

inline plcmine::Trace trace(const std::vector<std::string>& activities, plcmine::Tick start = 0) {
  plcmine::Trace t;
  plcmine::Tick tick = start;
  for (const auto& a : activities)
    t.events.push_back({a, plcmine::class_of_activity(a), tick++});
  return t;
}

// a -> p -> b with a source place feeding a and a sink after b.
inline plcmine::LabeledPetriNet chain_net() {
  using namespace plcmine;
  return LabeledPetriNet({"p", "p_in", "p_out"},
                         {{"t:a", A, TransitionClass::Input}, {"t:b", B, TransitionClass::Output}},
                         {{"p_in", "t:a"}, {"t:a", "p"}, {"p", "t:b"}, {"t:b", "p_out"}},
                         {{"p_in", 1}}, {{"p_out", 1}});
}

}  // namespace fixtures
