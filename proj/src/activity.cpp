#include "plcmine/activity.hpp"

#include <algorithm>

#include "plcmine/errors.hpp"

namespace plcmine {

std::string_view to_string(SignalClass cls) {
  return cls == SignalClass::Input ? "%I" : "%Q";
}

SignalClass parse_signal_class(std::string_view text) {
  if (text == "%I") return SignalClass::Input;
  if (text == "%Q") return SignalClass::Output;
  throw ParseError("unknown signal class '" + std::string(text) + "'");
}

SignalClass class_of_address(std::string_view address) {
  if (address.starts_with("%I")) return SignalClass::Input;
  if (address.starts_with("%Q")) return SignalClass::Output;
  throw WiringError("address '" + std::string(address) + "' has no %I/%Q prefix");
}

std::string format_component(const Component& c) {
  return c.address + (c.value ? "_true" : "_false");
}

Component parse_component(std::string_view text) {
  const auto sep = text.rfind('_');
  if (sep == std::string_view::npos || sep == 0)
    throw ParseError("malformed activity component '" + std::string(text) + "'");
  const auto value = text.substr(sep + 1);
  Component c{std::string(text.substr(0, sep)), false};
  if (value == "true")
    c.value = true;
  else if (value != "false")
    throw ParseError("malformed activity component '" + std::string(text) + "'");
  class_of_address(c.address);
  return c;
}

std::vector<Component> split_activity(std::string_view activity) {
  if (activity.empty()) throw ParseError("empty activity");
  std::vector<Component> out;
  std::size_t start = 0;
  while (true) {
    const auto plus = activity.find('+', start);
    out.push_back(parse_component(activity.substr(start, plus - start)));
    if (plus == std::string_view::npos) break;
    start = plus + 1;
  }
  return out;
}

std::string join_activity(std::vector<Component> components) {
  if (components.empty()) throw ParseError("empty activity");
  std::sort(components.begin(), components.end(),
            [](const Component& a, const Component& b) { return a.address < b.address; });
  for (std::size_t i = 1; i < components.size(); ++i)
    if (components[i].address == components[i - 1].address)
      throw ParseError("activity mentions address '" + components[i].address + "' twice");
  std::string out;
  for (const auto& c : components) {
    if (!out.empty()) out += '+';
    out += format_component(c);
  }
  return out;
}

std::string canonicalize_activity(std::string_view activity) {
  return join_activity(split_activity(activity));
}

bool activity_contains(std::string_view activity, std::string_view component) {
  std::size_t start = 0;
  while (true) {
    const auto plus = activity.find('+', start);
    if (activity.substr(start, plus - start) == component) return true;
    if (plus == std::string_view::npos) return false;
    start = plus + 1;
  }
}

SignalClass class_of_activity(std::string_view activity) {
  const auto parts = split_activity(activity);
  const auto cls = class_of_address(parts.front().address);
  for (const auto& p : parts)
    if (class_of_address(p.address) != cls)
      throw DataError("activity '" + std::string(activity) + "' mixes %I and %Q components");
  return cls;
}

}  // namespace plcmine
