// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <memory>
#include <sstream>
#include <string>

#include "plcmine/controller.hpp"
#include "plcmine/discovery.hpp"
#include "plcmine/net_json.hpp"
#include "plcmine/scenario.hpp"
#include "properties.hpp"

using namespace plcmine;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

void criterion(int id, const std::string& name, const std::function<bool(std::ostringstream&)>& body) {
  std::ostringstream detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail << "exception: " << e.what();
  }
  report(id, name, ok, detail.str());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Converted {
  EventLog log;
  double seconds = 0;
};

Converted record_and_convert(const ScenarioSpec& spec) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto run = run_closed_loop(spec.program, spec.plant, spec.duration_s);
  auto log = convert_io_log(run.io_log, spec);
  return {std::move(log), seconds_since(t0)};
}

bool trace_count(std::ostringstream& d, const char* scenario, long target, long tol) {
  const auto c = record_and_convert(make_scenario(scenario));
  const long complete = static_cast<long>(complete_traces(c.log).size());
  const long total = static_cast<long>(c.log.traces.size());
  d << complete << " complete traces (" << total << " incl. partial), target " << target << " +/- "
    << tol << ", " << c.seconds << " s";
  return std::abs(complete - target) <= tol && std::abs(total - target) <= tol && c.seconds < 5.0;
}

}  // namespace

int main() {
  PipelineOptions opts;

  criterion(1, "scenario-1 trace count", [](auto& d) { return trace_count(d, "scenario1", 48, 2); });

  criterion(2, "scenario-2/3 trace counts", [](auto& d) {
    const bool s2 = trace_count(d, "scenario2", 22, 3);
    d << "; ";
    const bool s3 = trace_count(d, "scenario3", 22, 3);
    return s2 && s3;
  });

  const auto s1 = run_pipeline(make_scenario("scenario1"), opts);
  const auto s2 = run_pipeline(make_scenario("scenario2"), opts);
  const auto s3 = run_pipeline(make_scenario("scenario3"), opts);

  criterion(3, "scenario-2 net isomorphic to scenario-3 net", [&](auto& d) {
    d << s2.net.num_places() << "P/" << s2.net.num_transitions() << "T vs " << s3.net.num_places()
      << "P/" << s3.net.num_transitions() << "T";
    return structurally_isomorphic(s2.net, s3.net);
  });

  auto s1_net = std::make_shared<const LabeledPetriNet>(s1.net);
  criterion(4, "scenario-1 never needs the predictor", [&](auto& d) {
    const auto audit = audit_decisions(s1.net, complete_traces(s1.log));
    const auto sub = run_substituted(s1_net, nullptr, make_scenario("scenario1").plant, 880.0);
    d << "replay r3=" << audit.r3 << ", substituted r3=" << sub.report.rule_counts.r3
      << ", predictor trained=" << s1.predictor.has_value();
    return audit.r3 == 0 && sub.report.rule_counts.r3 == 0 && !sub.report.deadlocked &&
           !s1.predictor.has_value();
  });

  criterion(5, "scenario-2 next-activity test accuracy", [&](auto& d) {
    if (!s2.predictor) {
      d << "no predictor trained";
      return false;
    }
    const auto again = run_pipeline(make_scenario("scenario2"), opts);
    const bool same = again.predictor &&
                      nap_model_to_json(again.predictor->model) == nap_model_to_json(s2.predictor->model);
    d << "17/5 split, " << s2.predictor->model.meta.epochs << " epochs, test accuracy "
      << s2.predictor->test_accuracy << " on " << s2.predictor->test_samples
      << " samples, repeat identical=" << same;
    return s2.predictor->test_accuracy == 1.0 && s2.predictor->model.meta.epochs <= 50 &&
           s2.report.train_traces == 17 && s2.report.test_traces == 5 && same;
  });

  criterion(6, "scenario-1 substitution equivalence", [&](auto& d) {
    const auto v = validate_substitution(make_scenario("scenario1"), s1_net, nullptr);
    d << "event sequences equal=" << v.report.comparison.event_sequence_equal
      << ", max level diff " << v.report.comparison.max_level_diff << " gal";
    return v.report.comparison.event_sequence_equal && v.report.comparison.max_level_diff <= 0.9;
  });

  criterion(7, "scenario-2 three fills per cycle under C'", [&](auto& d) {
    auto net = std::make_shared<const LabeledPetriNet>(s2.net);
    auto model = std::make_shared<const NapModel>(s2.predictor.value().model);
    const auto spec = make_scenario("scenario2");
    const auto sub = run_substituted(net, model, spec.plant, spec.duration_s);
    const auto fills = fills_per_cycle(sub.io_log, spec.reset);
    long bad = 0;
    for (int f : fills) bad += f != 3;
    d << fills.size() << " complete cycles, " << bad << " without exactly 3 fills, deadlocked="
      << sub.report.deadlocked;
    return !fills.empty() && bad == 0 && !sub.report.deadlocked;
  });

  criterion(8, "scenario-3 substitution under noise", [&](auto& d) {
    bool ok = true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto spec = make_scenario("scenario3", seed);
      const auto p = run_pipeline(spec, opts);
      auto net = std::make_shared<const LabeledPetriNet>(p.net);
      std::shared_ptr<const NapModel> model;
      if (p.predictor) model = std::make_shared<const NapModel>(p.predictor->model);
      const auto v = validate_substitution(spec, net, model);
      const auto c = cycle_sequences(v.original.io_log, spec.reset);
      const auto s = cycle_sequences(v.substituted.io_log, spec.reset);
      const bool seed_ok = v.report.passed && c == s && !v.report.substituted.deadlocked;
      d << "seed " << seed << ": " << s.size() << " cycles " << (seed_ok ? "ok" : "MISMATCH") << "; ";
      ok &= seed_ok;
    }
    return ok;
  });

  criterion(9, "property suites", [](auto& d) {
    const std::pair<const char*, properties::Outcome> suites[] = {
        {"rediscovery fitness", properties::rediscovery_fitness(11)},
        {"firing rule", properties::firing_rule(12)},
        {"lossless delta", properties::lossless_delta(13)},
        {"decay shape", properties::decay_shape(14)},
        {"gradient check 1e-4", properties::gradient_check(15)},
        {"softmax 1e-9", properties::softmax_normalised(16)},
    };
    bool ok = true;
    for (const auto& [name, r] : suites) {
      d << name << "=" << (r.ok ? "ok" : r.detail) << "; ";
      ok &= r.ok;
    }
    return ok;
  });

  criterion(10, "pipeline determinism", [&](auto& d) {
    bool ok = true;
    for (const auto* first : {&s1, &s2, &s3}) {
      const auto name = first->report.scenario;
      const auto again = run_pipeline(make_scenario(name), opts);
      const bool log_eq = event_log_to_json(again.log) == event_log_to_json(first->log);
      const bool net_eq = net_to_json(again.net) == net_to_json(first->net);
      const bool model_eq = again.predictor.has_value() == first->predictor.has_value() &&
                            (!again.predictor || nap_model_to_json(again.predictor->model) ==
                                                     nap_model_to_json(first->predictor->model));
      d << name << " log/net/model identical=" << log_eq << net_eq << model_eq << "; ";
      ok &= log_eq && net_eq && model_eq;
    }
    return ok;
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
