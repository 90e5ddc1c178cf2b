#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "plcmine/errors.hpp"
#include "plcmine/event_log.hpp"
#include "plcmine/ladder.hpp"

using namespace plcmine;

namespace {

IOSample in(Tick t, const char* addr, bool v) { return {t, addr, v, SignalClass::Input}; }
IOSample out(Tick t, const char* addr, bool v) { return {t, addr, v, SignalClass::Output}; }

Event ev(const std::string& a, Tick t = 0) { return {a, class_of_activity(a), t}; }

std::vector<std::string> activities(const Trace& t) {
  std::vector<std::string> out;
  for (const auto& e : t.events) out.push_back(e.activity);
  return out;
}

}  // namespace

TEST_CASE("same-tick input changes merge into one activity") {
  const std::vector<IOSample> log{in(1, "%IX0.1", true), in(1, "%IX0.2", true),
                                  out(1, "%QX0.0", false)};
  const auto events = reduce_log(log);
  REQUIRE(events.size() == 1);
  CHECK(events[0] == Event{"%IX0.1_true+%IX0.2_true", SignalClass::Input, 1});
}

TEST_CASE("unchanged ticks emit nothing") {
  const std::vector<IOSample> log{in(1, "%IX0.0", true), in(2, "%IX0.0", true),
                                  in(3, "%IX0.0", true)};
  CHECK(reduce_log(log).size() == 1);
}

TEST_CASE("input and output changes at one tick stay separate") {
  const std::vector<IOSample> log{in(5, "%IX0.0", true), out(5, "%QX0.1", true)};
  const auto events = reduce_log(log);
  REQUIRE(events.size() == 2);
  CHECK(events[0].cls == SignalClass::Input);
  CHECK(events[1].cls == SignalClass::Output);
}

TEST_CASE("malformed IO streams are rejected") {
  CHECK_THROWS_AS(reduce_log(std::vector<IOSample>{in(2, "%IX0.0", true), in(1, "%IX0.0", false)}),
                  OrderingError);
  CHECK_THROWS_AS(reduce_log(std::vector<IOSample>{out(1, "%QX0.0", true), in(1, "%IX0.0", true)}),
                  OrderingError);
  CHECK_THROWS_AS(reduce_log(std::vector<IOSample>{{1, "%QX0.0", true, SignalClass::Input}}),
                  WiringError);
}

TEST_CASE("traces split on the reset activity") {
  using fixtures::A;
  using fixtures::B;
  using fixtures::C;
  const std::string R = "%IX0.1_false+%IX0.2_false";
  const std::vector<Event> events{ev(A), ev(R), ev(B), ev(R), ev(C)};
  const auto log = split_traces(events, fixtures::R);
  REQUIRE(log.traces.size() == 3);
  CHECK(activities(log.traces[0]) == std::vector<std::string>{A});
  CHECK(activities(log.traces[1]) == std::vector<std::string>{R, B});
  CHECK(activities(log.traces[2]) == std::vector<std::string>{R, C});
  CHECK(flatten(log) == events);

  const auto complete = complete_traces(log);
  REQUIRE(complete.size() == 1);
  CHECK(complete[0] == log.traces[1]);
}

TEST_CASE("a lone reset yields one trace and a missing reset warns") {
  const std::vector<Event> only{ev(fixtures::R)};
  CHECK(split_traces(only, fixtures::R).traces.size() == 1);

  std::vector<std::string> warnings;
  const std::vector<Event> none{ev(fixtures::A), ev(fixtures::B)};
  const auto log = split_traces(none, fixtures::R, &warnings);
  CHECK(log.traces.size() == 1);
  CHECK(warnings.size() == 1);
}

TEST_CASE("event log JSON round-trips and rejects bad input") {
  EventLog log;
  log.meta = {"scenario1", fixtures::R, 880, 0.1};
  log.traces = {fixtures::trace({fixtures::R, fixtures::B}), fixtures::trace({fixtures::R}, 9)};
  const auto text = event_log_to_json(log);
  CHECK(event_log_from_json(text) == log);
  CHECK(event_log_to_json(event_log_from_json(text)) == text);

  CHECK_THROWS_AS(event_log_to_json(EventLog{}), InvariantError);
  EventLog with_empty = log;
  with_empty.traces.push_back({});
  CHECK_THROWS_AS(event_log_to_json(with_empty), InvariantError);

  try {
    event_log_from_json("{\n  \"traces\": [\n    {\"events\": [}\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("IO log CSV round-trips and reports line numbers") {
  const auto run = run_closed_loop(make_c2(), PlantConfig::noisy(4), 40.0);
  std::stringstream buf;
  write_io_log(run.io_log, buf);
  CHECK(read_io_log(buf) == run.io_log);

  std::stringstream header_only;
  write_io_log(std::vector<IOSample>{}, header_only);
  CHECK(header_only.str() == "tick,address,value,class\n");
  CHECK(read_io_log(header_only).empty());

  std::stringstream bad("tick,address,value,class\n0,%IX0.0,true,%I\n1,%IX0.0,maybe,%I\n");
  try {
    read_io_log(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("events are class-pure and reduction is idempotent") {
  const auto run = run_closed_loop(make_c2(), PlantConfig::noisy(11), 200.0);
  const auto events = reduce_log(run.io_log);
  for (const auto& e : events) CHECK(class_of_activity(e.activity) == e.cls);

  // Re-expanding the events into samples and reducing again gives the same events.
  std::vector<IOSample> again;
  for (const auto& e : events)
    for (const auto& c : split_activity(e.activity)) again.push_back({e.tick, c.address, c.value, e.cls});
  CHECK(reduce_log(again) == events);
}
