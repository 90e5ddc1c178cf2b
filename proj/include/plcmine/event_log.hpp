#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plcmine/activity.hpp"

namespace plcmine {

using Tick = std::int64_t;

/// One tapped reading of a physical address during one scan.
struct IOSample {
  Tick tick = 0;
  std::string address;
  bool value = false;
  SignalClass cls = SignalClass::Input;

  friend bool operator==(const IOSample&, const IOSample&) = default;
};

struct Event {
  std::string activity;
  SignalClass cls = SignalClass::Input;
  Tick tick = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

struct Trace {
  std::vector<Event> events;
  friend bool operator==(const Trace&, const Trace&) = default;
};

struct EventLogMeta {
  std::string scenario;
  std::string reset;
  double duration_s = 0.0;
  double dt_s = 0.1;
  friend bool operator==(const EventLogMeta&, const EventLogMeta&) = default;
};

struct EventLog {
  EventLogMeta meta;
  std::vector<Trace> traces;
  friend bool operator==(const EventLog&, const EventLog&) = default;
};

/// Change detection plus same-tick/same-class merging.
///
/// Each address starts at an implicit `false`; a sample produces a component
/// only when its value differs from the last recorded value of that address.
/// Components sharing a tick and a class are merged into one event whose
/// activity is the address-sorted "+"-join. Within a tick the %I event comes
/// before the %Q event.
///
/// Throws OrderingError when ticks decrease or an %I sample follows a %Q sample
/// within the same tick, and WiringError when a sample's class disagrees with
/// its address prefix.
std::vector<Event> reduce_log(std::span<const IOSample> samples);

/// Slices the event stream into traces, starting a new trace at every event
/// whose activity contains `reset` as a component. The prefix before the first
/// reset is kept as a leading trace. When `reset` never occurs the whole stream
/// becomes one trace and a warning is appended to `warnings` (if given).
EventLog split_traces(std::span<const Event> events, std::string_view reset,
                      std::vector<std::string>* warnings = nullptr);

/// Traces that begin with the reset component and are followed by another
/// trace, i.e. whole process cycles bounded by two resets.
std::vector<Trace> complete_traces(const EventLog& log);

/// Concatenation of all traces in order.
std::vector<Event> flatten(const EventLog& log);

void write_event_log(const EventLog& log, const std::filesystem::path& path);
EventLog read_event_log(const std::filesystem::path& path);
std::string event_log_to_json(const EventLog& log);
EventLog event_log_from_json(std::string_view text);

/// IO log CSV: header `tick,address,value,class`, rows sorted by
/// (tick, %I before %Q, address).
void write_io_log(std::span<const IOSample> samples, const std::filesystem::path& path);
std::vector<IOSample> read_io_log(const std::filesystem::path& path);
void write_io_log(std::span<const IOSample> samples, std::ostream& out);
std::vector<IOSample> read_io_log(std::istream& in);

}  // namespace plcmine
