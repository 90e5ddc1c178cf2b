#include "plcmine/net_json.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "plcmine/errors.hpp"

namespace plcmine {

using nlohmann::json;

namespace {

json class_json(TransitionClass cls) {
  switch (cls) {
    case TransitionClass::Input: return "%I";
    case TransitionClass::Output: return "%Q";
    case TransitionClass::Hidden: break;
  }
  return nullptr;
}

TransitionClass class_from_json(const json& j) {
  if (j.is_null()) return TransitionClass::Hidden;
  const auto s = j.get<std::string>();
  if (s == "%I") return TransitionClass::Input;
  if (s == "%Q") return TransitionClass::Output;
  throw ParseError("net: unknown transition class '" + s + "'");
}

std::map<std::string, int> marking_map(const std::vector<std::string>& places, const json& j,
                                       const char* what) {
  const auto tokens = j.get<std::vector<int>>();
  if (tokens.size() != places.size())
    throw ParseError(std::string("net: ") + what + " length does not match places");
  std::map<std::string, int> out;
  for (std::size_t i = 0; i < places.size(); ++i) out[places[i]] = tokens[i];
  return out;
}

}  // namespace

std::string net_to_json(const LabeledPetriNet& net) {
  json transitions = json::array();
  for (const auto& t : net.transitions())
    transitions.push_back({{"id", t.id},
                           {"label", t.label ? json(*t.label) : json(nullptr)},
                           {"class", class_json(t.cls)}});
  json arcs = json::array();
  for (const auto& a : net.arcs()) arcs.push_back({{"from", a.from}, {"to", a.to}});
  json doc = {{"places", net.places()},
              {"transitions", std::move(transitions)},
              {"arcs", std::move(arcs)},
              {"initial_marking", net.initial_marking().tokens},
              {"final_marking", net.final_marking().tokens}};
  return doc.dump(2) + "\n";
}

LabeledPetriNet net_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("net: ") + e.what());
  }
  try {
    auto places = doc.at("places").get<std::vector<std::string>>();
    if (!std::is_sorted(places.begin(), places.end()))
      throw ParseError("net: places are not in canonical order");
    std::vector<Transition> transitions;
    for (const auto& t : doc.at("transitions")) {
      Transition tr;
      tr.id = t.at("id").get<std::string>();
      if (!t.at("label").is_null()) tr.label = t.at("label").get<std::string>();
      tr.cls = class_from_json(t.at("class"));
      transitions.push_back(std::move(tr));
    }
    std::vector<Arc> arcs;
    for (const auto& a : doc.at("arcs"))
      arcs.push_back({a.at("from").get<std::string>(), a.at("to").get<std::string>()});
    auto initial = marking_map(places, doc.at("initial_marking"), "initial_marking");
    auto final_m = marking_map(places, doc.at("final_marking"), "final_marking");
    return LabeledPetriNet(std::move(places), std::move(transitions), std::move(arcs), initial,
                           final_m);
  } catch (const json::exception& e) {
    throw ParseError(std::string("net: ") + e.what());
  } catch (const InvariantError& e) {
    throw ParseError(std::string("net: ") + e.what());
  }
}

void write_net(const LabeledPetriNet& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << net_to_json(net);
}

LabeledPetriNet read_net(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return net_from_json(ss.str());
}

}  // namespace plcmine
