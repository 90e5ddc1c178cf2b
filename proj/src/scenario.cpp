#include "plcmine/scenario.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "plcmine/errors.hpp"
#include "plcmine/replay.hpp"

namespace plcmine {

ScenarioSpec make_scenario(std::string_view name, std::uint64_t seed, double duration_s,
                           double dt) {
  ScenarioSpec spec;
  spec.name = std::string(name);
  spec.seed = seed;
  spec.duration_s = duration_s;
  if (name == "scenario1") {
    spec.plant = PlantConfig::deterministic();
    spec.program = make_c1();
  } else if (name == "scenario2") {
    spec.plant = PlantConfig::deterministic();
    spec.program = make_c2();
  } else if (name == "scenario3") {
    spec.plant = PlantConfig::noisy(0);
    spec.program = make_c2();
  } else {
    throw ConfigurationError("unknown scenario '" + std::string(name) + "'");
  }
  spec.plant.seed = derive_seed(seed, kPlantSeedStream);
  spec.plant.dt = dt;
  spec.plant.validate();
  if (duration_s < 0.0) throw ConfigurationError("duration must be non-negative");
  return spec;
}

EventLog convert_io_log(std::span<const IOSample> io_log, const ScenarioSpec& spec,
                        std::vector<std::string>* warnings) {
  auto log = split_traces(reduce_log(io_log), spec.reset, warnings);
  log.meta = {spec.name, spec.reset, spec.duration_s, spec.plant.dt};
  return log;
}

LabeledPetriNet discover_from_log(const EventLog& log, const DiscoveryConfig& cfg) {
  const auto complete = complete_traces(log);
  if (complete.empty()) throw NoModelError("event log holds no complete cycle");
  return discover_net(complete, cfg);
}

TraceSplit chronological_split(const EventLog& log, int train, int test) {
  if (train < 1 || test < 0) throw ConfigurationError("split needs >= 1 training trace");
  const auto complete = complete_traces(log);
  const auto n = static_cast<int>(complete.size());
  if (n < test + 1)
    throw DataError("only " + std::to_string(n) + " complete traces for a " +
                    std::to_string(train) + "/" + std::to_string(test) + " split");
  TraceSplit split;
  const int test_begin = n - test;
  const int train_begin = std::max(0, test_begin - train);
  split.train.assign(complete.begin() + train_begin, complete.begin() + test_begin);
  split.test.assign(complete.begin() + test_begin, complete.end());
  return split;
}

NapTraining train_predictor(const LabeledPetriNet& net, const TraceSplit& split, double dt,
                            const TrainConfig& cfg) {
  NapTraining out;
  const auto decay = estimate_decay_params(net, split.train, dt);
  const auto train = sample_log(net, split.train, decay, dt);
  const auto test = sample_log(net, split.test, decay, dt);
  out.model = train_nap(train.samples, activity_vocabulary(net), decay, cfg);
  out.train_samples = train.samples.size();
  out.test_samples = test.samples.size();
  out.skipped_traces = train.skipped_traces + test.skipped_traces;
  out.test_accuracy = test.samples.empty() ? 0.0 : accuracy(out.model, test.samples);
  if (!test.samples.empty()) out.model.meta.test_accuracy = out.test_accuracy;
  return out;
}

PipelineResult run_pipeline(const ScenarioSpec& spec, const PipelineOptions& options) {
  PipelineResult r;
  auto& rep = r.report;
  rep.scenario = spec.name;
  rep.seed = spec.seed;
  rep.rng = std::string(kRngAlgorithm);

  r.recording = run_closed_loop(spec.program, spec.plant, spec.duration_s);
  rep.ticks = static_cast<long>(r.recording.trajectory.size());

  r.log = convert_io_log(r.recording.io_log, spec, &rep.warnings);
  rep.traces = static_cast<long>(r.log.traces.size());
  const auto complete = complete_traces(r.log);
  rep.complete_traces = static_cast<long>(complete.size());
  for (const auto& t : r.log.traces) rep.change_events += static_cast<long>(t.events.size());

  r.dfg = filter_dfg(build_dfg(complete), options.discovery);
  r.net = discover_from_log(r.log, options.discovery);
  rep.places = r.net.num_places();
  rep.transitions = r.net.num_transitions();
  rep.arcs = r.net.arcs().size();

  std::vector<Trace> fitting;
  for (const auto& t : complete)
    if (replay_trace(r.net, t).missing_tokens == 0) fitting.push_back(t);
  rep.replay_fitness =
      complete.empty() ? 0.0 : static_cast<double>(fitting.size()) / static_cast<double>(complete.size());
  rep.replay_decisions = audit_decisions(r.net, fitting);
  rep.predictor_required = rep.replay_decisions.r3 > 0;

  if (rep.predictor_required || options.force_predictor) {
    const auto split = chronological_split(r.log, options.train_traces, options.test_traces);
    auto cfg = options.training;
    cfg.seed = derive_seed(spec.seed, kNetworkSeedStream);
    r.predictor = train_predictor(r.net, split, spec.plant.dt, cfg);
    rep.train_traces = static_cast<long>(split.train.size());
    rep.test_traces = static_cast<long>(split.test.size());
    rep.train_accuracy = r.predictor->model.meta.train_accuracy;
    if (!split.test.empty()) rep.test_accuracy = r.predictor->test_accuracy;
  }
  return r;
}

std::string pipeline_report_to_json(const PipelineReport& r) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json doc = {{"scenario", r.scenario},
              {"seed", r.seed},
              {"rng", r.rng},
              {"ticks", r.ticks},
              {"change_events", r.change_events},
              {"traces", r.traces},
              {"complete_traces", r.complete_traces},
              {"net", {{"places", r.places}, {"transitions", r.transitions}, {"arcs", r.arcs}}},
              {"replay_fitness", r.replay_fitness},
              {"replay_decisions",
               {{"r1", r.replay_decisions.r1},
                {"r2", r.replay_decisions.r2},
                {"r3", r.replay_decisions.r3},
                {"hidden", r.replay_decisions.hidden}}},
              {"predictor_required", r.predictor_required},
              {"train_traces", r.train_traces},
              {"test_traces", r.test_traces},
              {"train_accuracy", opt(r.train_accuracy)},
              {"test_accuracy", opt(r.test_accuracy)},
              {"warnings", r.warnings}};
  return doc.dump(2) + "\n";
}

std::vector<int> fills_per_cycle(std::span<const IOSample> io_log, std::string_view reset) {
  const std::string uls_true = std::string(wiring::kUls) + "_true";
  std::vector<int> out;
  for (const auto& cycle : cycle_sequences(io_log, reset))
    out.push_back(static_cast<int>(std::count_if(cycle.begin(), cycle.end(), [&](const std::string& a) {
      return activity_contains(a, uls_true);
    })));
  return out;
}

ValidationRun validate_substitution(const ScenarioSpec& spec,
                                    std::shared_ptr<const LabeledPetriNet> net,
                                    std::shared_ptr<const NapModel> model,
                                    ControllerOptions options) {
  std::set<std::string> wired{std::string(wiring::kUls), std::string(wiring::kLls),
                              std::string(wiring::kMls)};
  for (const auto& [addr, v] : spec.program.outputs) wired.insert(addr);
  for (const auto& t : net->transitions()) {
    if (!t.label) continue;
    for (const auto& c : split_activity(*t.label))
      if (!wired.contains(c.address))
        throw ValidationError("net uses " + c.address + ", which is not tapped in the " +
                              spec.name + " wiring");
  }

  ValidationRun v;
  v.original = run_closed_loop(spec.program, spec.plant, spec.duration_s);
  v.substituted = run_substituted(net, std::move(model), spec.plant, spec.duration_s, options);
  auto& rep = v.report;
  rep.substituted = v.substituted.report;
  if (v.substituted.trajectory.size() == v.original.trajectory.size()) {
    rep.comparison = compare_trajectories(v.original.trajectory, v.original.io_log,
                                          v.substituted.trajectory, v.substituted.io_log);
  } else {
    rep.comparison.event_sequence_equal = false;
  }

  const auto a = cycle_sequences(v.original.io_log, spec.reset);
  const auto b = cycle_sequences(v.substituted.io_log, spec.reset);
  rep.original_cycles = static_cast<long>(a.size());
  rep.substituted_cycles = static_cast<long>(b.size());
  const std::set<std::vector<std::string>> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  rep.cycles_equal = !a.empty() && sa == sb;
  rep.original_fills_per_cycle = fills_per_cycle(v.original.io_log, spec.reset);
  rep.substituted_fills_per_cycle = fills_per_cycle(v.substituted.io_log, spec.reset);
  rep.passed = rep.comparison.event_sequence_equal && rep.cycles_equal &&
               !rep.substituted.deadlocked && rep.substituted.violations == 0;
  return v;
}

std::string validation_report_to_json(const ValidationReport& r) {
  using nlohmann::json;
  const auto run = json::parse(run_report_to_json(r.substituted));
  json doc = {{"passed", r.passed},
              {"maxLevelDiff", r.comparison.max_level_diff},
              {"switchTickDiffs", r.comparison.switch_tick_diffs},
              {"switchCountEqual", r.comparison.switch_count_equal},
              {"eventSequenceEqual", r.comparison.event_sequence_equal},
              {"cyclesEqual", r.cycles_equal},
              {"originalCycles", r.original_cycles},
              {"substitutedCycles", r.substituted_cycles},
              {"originalFillsPerCycle", r.original_fills_per_cycle},
              {"substitutedFillsPerCycle", r.substituted_fills_per_cycle},
              {"substitutedRun", run}};
  return doc.dump(2) + "\n";
}

}  // namespace plcmine
