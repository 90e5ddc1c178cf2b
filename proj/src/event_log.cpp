#include "plcmine/event_log.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "plcmine/errors.hpp"

namespace plcmine {

using nlohmann::json;

std::vector<Event> reduce_log(std::span<const IOSample> samples) {
  std::map<std::string, bool, std::less<>> last;
  std::vector<Event> events;
  std::vector<Component> pending;
  Tick group_tick = 0;
  SignalClass group_cls = SignalClass::Input;
  bool have_prev = false;
  Tick prev_tick = 0;
  SignalClass prev_cls = SignalClass::Input;

  auto flush = [&] {
    if (pending.empty()) return;
    events.push_back({join_activity(std::move(pending)), group_cls, group_tick});
    pending.clear();
  };

  for (const auto& s : samples) {
    if (class_of_address(s.address) != s.cls)
      throw WiringError("sample for " + s.address + " carries class " +
                        std::string(to_string(s.cls)));
    if (have_prev) {
      if (s.tick < prev_tick)
        throw OrderingError("tick " + std::to_string(s.tick) + " follows tick " +
                            std::to_string(prev_tick));
      if (s.tick == prev_tick && prev_cls == SignalClass::Output && s.cls == SignalClass::Input)
        throw OrderingError("input sample after output sample at tick " + std::to_string(s.tick));
    }
    if (!have_prev || s.tick != group_tick || s.cls != group_cls) {
      flush();
      group_tick = s.tick;
      group_cls = s.cls;
    }
    have_prev = true;
    prev_tick = s.tick;
    prev_cls = s.cls;

    auto it = last.find(s.address);
    const bool before = it == last.end() ? false : it->second;
    if (it == last.end())
      last.emplace(s.address, s.value);
    else
      it->second = s.value;
    if (s.value != before) pending.push_back({s.address, s.value});
  }
  flush();
  return events;
}

EventLog split_traces(std::span<const Event> events, std::string_view reset,
                      std::vector<std::string>* warnings) {
  EventLog log;
  log.meta.reset = std::string(reset);
  Trace current;
  bool seen = false;
  for (const auto& e : events) {
    if (activity_contains(e.activity, reset)) {
      seen = true;
      if (!current.events.empty()) log.traces.push_back(std::move(current));
      current = Trace{};
    }
    current.events.push_back(e);
  }
  if (!current.events.empty()) log.traces.push_back(std::move(current));
  if (!seen && warnings)
    warnings->push_back("reset activity '" + std::string(reset) +
                        "' never occurs; the log holds a single trace");
  return log;
}

std::vector<Trace> complete_traces(const EventLog& log) {
  std::vector<Trace> out;
  for (std::size_t i = 0; i + 1 < log.traces.size(); ++i) {
    const auto& t = log.traces[i];
    if (!t.events.empty() && activity_contains(t.events.front().activity, log.meta.reset))
      out.push_back(t);
  }
  return out;
}

std::vector<Event> flatten(const EventLog& log) {
  std::vector<Event> out;
  for (const auto& t : log.traces) out.insert(out.end(), t.events.begin(), t.events.end());
  return out;
}

std::string event_log_to_json(const EventLog& log) {
  if (log.traces.empty()) throw InvariantError("event log has no traces");
  json traces = json::array();
  for (const auto& t : log.traces) {
    if (t.events.empty()) throw InvariantError("event log contains an empty trace");
    json events = json::array();
    for (const auto& e : t.events)
      events.push_back({{"activity", e.activity},
                        {"class", std::string(to_string(e.cls))},
                        {"tick", e.tick}});
    traces.push_back({{"events", std::move(events)}});
  }
  json doc = {{"meta",
               {{"scenario", log.meta.scenario},
                {"reset", log.meta.reset},
                {"duration_s", log.meta.duration_s},
                {"dt_s", log.meta.dt_s}}},
              {"traces", std::move(traces)}};
  return doc.dump(2) + "\n";
}

EventLog event_log_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("event log: ") + e.what());
  }
  try {
    EventLog log;
    const auto& meta = doc.at("meta");
    log.meta.scenario = meta.at("scenario").get<std::string>();
    log.meta.reset = meta.at("reset").get<std::string>();
    log.meta.duration_s = meta.at("duration_s").get<double>();
    log.meta.dt_s = meta.at("dt_s").get<double>();
    for (const auto& t : doc.at("traces")) {
      Trace trace;
      for (const auto& e : t.at("events"))
        trace.events.push_back({e.at("activity").get<std::string>(),
                                parse_signal_class(e.at("class").get<std::string>()),
                                e.at("tick").get<Tick>()});
      if (trace.events.empty()) throw ParseError("event log: empty trace");
      log.traces.push_back(std::move(trace));
    }
    if (log.traces.empty()) throw ParseError("event log: no traces");
    return log;
  } catch (const json::exception& e) {
    throw ParseError(std::string("event log: ") + e.what());
  }
}

void write_event_log(const EventLog& log, const std::filesystem::path& path) {
  const auto text = event_log_to_json(log);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

EventLog read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return event_log_from_json(ss.str());
}

}  // namespace plcmine
