#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "plcmine/petri_net.hpp"

namespace plcmine {

// {"places": [...], "transitions": [{"id", "label", "class"}], "arcs": [{"from", "to"}],
//  "initial_marking": [...], "final_marking": [...]}, everything in canonical order.
std::string net_to_json(const LabeledPetriNet& net);
LabeledPetriNet net_from_json(std::string_view text);

void write_net(const LabeledPetriNet& net, const std::filesystem::path& path);
LabeledPetriNet read_net(const std::filesystem::path& path);

}  // namespace plcmine
