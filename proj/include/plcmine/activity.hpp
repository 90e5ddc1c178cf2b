#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace plcmine {

// Physical address class. Inputs are %I..., outputs %Q...
enum class SignalClass { Input, Output };

std::string_view to_string(SignalClass cls);
SignalClass parse_signal_class(std::string_view text);

/// Class implied by an address prefix; throws WiringError for anything that is
/// neither %I nor %Q.
SignalClass class_of_address(std::string_view address);

/// One observed value change, written `<address>_<true|false>`.
struct Component {
  std::string address;
  bool value = false;

  friend bool operator==(const Component&, const Component&) = default;
};

std::string format_component(const Component& c);
Component parse_component(std::string_view text);

/// Merged activities are "+"-joined components sorted by address.
std::vector<Component> split_activity(std::string_view activity);
std::string join_activity(std::vector<Component> components);
std::string canonicalize_activity(std::string_view activity);

/// True when `component` is one of the "+"-separated parts of `activity`.
bool activity_contains(std::string_view activity, std::string_view component);

/// Class shared by all components of an activity; throws if they disagree.
SignalClass class_of_activity(std::string_view activity);

}  // namespace plcmine
