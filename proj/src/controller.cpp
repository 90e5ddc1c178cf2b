#include "plcmine/controller.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "plcmine/errors.hpp"
#include "plcmine/ladder.hpp"
#include "plcmine/replay.hpp"

namespace plcmine {

EnabledSets classify_enabled(const LabeledPetriNet& net, const Marking& m) {
  EnabledSets sets;
  for (auto t : enabled_transitions(net, m)) {
    switch (net.transitions()[t].cls) {
      case TransitionClass::Input: sets.inputs.push_back(t); break;
      case TransitionClass::Output: sets.outputs.push_back(t); break;
      case TransitionClass::Hidden: sets.hidden.push_back(t); break;
    }
  }
  return sets;
}

Decision classify_round(const EnabledSets& s) {
  if (s.inputs.empty() && s.outputs.empty())
    return s.hidden.empty() ? Decision::Idle : Decision::Hidden;
  if (s.outputs.empty()) return Decision::Rule1;
  if (s.outputs.size() == 1 && s.inputs.empty() && s.hidden.empty()) return Decision::Rule2;
  return Decision::Rule3;
}

Decision classify_round(const LabeledPetriNet& net, const Marking& m) {
  return classify_round(classify_enabled(net, m));
}

namespace {

void tally(RuleCounts& c, Decision d) {
  switch (d) {
    case Decision::Rule1: ++c.r1; break;
    case Decision::Rule2: ++c.r2; break;
    case Decision::Rule3: ++c.r3; break;
    case Decision::Hidden: ++c.hidden; break;
    case Decision::Idle: break;
  }
}

}  // namespace

RuleCounts audit_decisions(const LabeledPetriNet& net, std::span<const Trace> traces) {
  RuleCounts counts;
  for (const auto& trace : traces) {
    const auto replay = replay_trace(net, trace);
    Marking m = net.initial_marking();
    bool events_done = trace.events.empty();
    for (const auto& step : replay.fired_sequence) {
      if (step.event_index || !events_done) tally(counts, classify_round(net, m));
      if (step.event_index && *step.event_index + 1 == trace.events.size()) events_done = true;
      // Forced tokens are not reproduced here; only fitting traces are audited.
      if (!is_enabled(net, m, step.transition)) break;
      m = fire(net, m, step.transition);
    }
  }
  return counts;
}

ControllerState make_controller(std::shared_ptr<const LabeledPetriNet> net,
                                std::shared_ptr<const NapModel> model, ControllerOptions options) {
  if (!net) throw ConfigurationError("controller needs a net");
  if (model) {
    if (static_cast<std::size_t>(model->network.inputs()) != 3 * net->num_places())
      throw ConfigurationError("model input width does not match the net's places");
    model->decay.validate(net->num_places());
  }
  ControllerState s;
  s.net = std::move(net);
  s.model = std::move(model);
  s.options = options;
  s.marking = s.net->initial_marking();
  s.tracker.begin(*s.net);
  return s;
}

namespace {

std::set<std::string> components_of(const std::string& activity) {
  std::set<std::string> out;
  for (const auto& c : split_activity(activity)) out.insert(format_component(c));
  return out;
}

std::optional<std::size_t> match_input(const LabeledPetriNet& net,
                                       std::span<const std::size_t> inputs,
                                       const Observation& obs, bool allow_image) {
  for (auto t : inputs)
    if (components_of(*net.transitions()[t].label) == obs.changes) return t;
  if (allow_image)
    for (auto t : inputs) {
      const auto comps = components_of(*net.transitions()[t].label);
      if (std::includes(obs.image.begin(), obs.image.end(), comps.begin(), comps.end())) return t;
    }
  return std::nullopt;
}

std::string dump_marking(const LabeledPetriNet& net, const Marking& m) {
  std::string out;
  for (std::size_t p = 0; p < m.size(); ++p)
    if (m[p] > 0) out += (out.empty() ? "" : ", ") + net.places()[p] + "=" + std::to_string(m[p]);
  return "{" + out + "}";
}

struct Step {
  ControllerState& s;
  std::map<std::string, bool>& commands;

  void fire(std::size_t t) {
    s.tracker.fire(*s.net, t, s.clock);
    s.marking = s.tracker.marking();
    s.synchronised = true;
    const auto& tr = s.net->transitions()[t];
    if (tr.cls == TransitionClass::Output)
      for (const auto& c : split_activity(*tr.label)) {
        commands[c.address] = c.value;
        s.output_image[c.address] = c.value;
      }
  }

  void new_cycle() {
    ++s.cycles;
    s.marking = s.net->initial_marking();
    s.tracker.begin(*s.net);
    s.output_image.clear();
  }
};

}  // namespace

ControlResult control_step(ControllerState state, const Observation& obs) {
  ControlResult result;
  ControllerState& s = state;
  Step step{s, result.commands};
  const LabeledPetriNet& net = *s.net;
  s.clock = obs.clock;
  bool consumed = obs.changes.empty();
  bool progressed = false;

  int round = 0;
  for (; round < s.options.max_rounds_per_tick && !s.deadlocked; ++round) {
    if (s.marking == net.final_marking()) {
      step.new_cycle();
      progressed = true;
      continue;
    }
    const auto sets = classify_enabled(net, s.marking);
    const auto decision = classify_round(sets);

    if (decision == Decision::Idle) {
      s.deadlocked = true;
      s.log.push_back("deadlock at t=" + std::to_string(s.clock) + " marking " +
                      dump_marking(net, s.marking));
      break;
    }
    if (decision == Decision::Hidden) {
      step.fire(sets.hidden.front());
      ++s.rule_counts.hidden;
      progressed = true;
      continue;
    }
    if (decision == Decision::Rule2) {
      step.fire(sets.outputs.front());
      ++s.rule_counts.r2;
      progressed = true;
      continue;
    }
    if (decision == Decision::Rule1) {
      if (!consumed || !s.synchronised) {
        if (auto t = match_input(net, sets.inputs, obs, !s.synchronised)) {
          step.fire(*t);
          ++s.rule_counts.r1;
          consumed = true;
          progressed = true;
          continue;
        }
      }
      // An observation that starts the next cycle closes the current one
      // when an end route is open.
      if (!consumed && !sets.hidden.empty()) {
        const auto initial_inputs = classify_enabled(net, net.initial_marking()).inputs;
        const auto& target = net.final_marking();
        if (match_input(net, initial_inputs, obs, false))
          if (auto path = hidden_path(net, s.marking, [&](const Marking& m) { return m == target; })) {
            for (auto h : *path) {
              step.fire(h);
              ++s.rule_counts.hidden;
            }
            progressed = true;
            continue;
          }
      }
      break;
    }

    // Rule 3
    if (!s.model) throw ConfigurationError("ambiguous marking " + dump_marking(net, s.marking) +
                                           " needs a next-activity model");
    ++s.rule_counts.r3;
    const auto sample = s.tracker.snapshot(s.model->decay, s.clock, "");
    std::optional<std::size_t> chosen;
    bool end_chosen = false;
    for (const auto& [label, p] : predict_next(*s.model, sample)) {
      if (label == kEndLabel) {
        if (!sets.hidden.empty()) {
          end_chosen = true;
          break;
        }
        continue;
      }
      for (const auto* group : {&sets.outputs, &sets.inputs})
        for (auto t : *group)
          if (*net.transitions()[t].label == label && !chosen) chosen = t;
      if (chosen) break;
    }
    if (end_chosen) {
      step.new_cycle();
      progressed = true;
      continue;
    }
    if (!chosen) break;
    if (net.transitions()[*chosen].cls == TransitionClass::Output) {
      step.fire(*chosen);
      progressed = true;
      continue;
    }
    const std::array<std::size_t, 1> only{*chosen};
    if (!consumed && match_input(net, only, obs, !s.synchronised)) {
      step.fire(*chosen);
      consumed = true;
      progressed = true;
      continue;
    }
    break;
  }
  if (round == s.options.max_rounds_per_tick)
    s.log.push_back("round limit reached at t=" + std::to_string(s.clock));

  if (!consumed) {
    ++s.violations;
    std::string seen;
    for (const auto& c : obs.changes) seen += (seen.empty() ? "" : "+") + c;
    const auto msg = "unexpected input " + seen + " at t=" + std::to_string(s.clock) +
                     " in marking " + dump_marking(net, s.marking);
    if (s.options.strict) throw ValidationError(msg);
    s.log.push_back(msg);
  }

  if (progressed) {
    s.last_progress = s.clock;
    s.liveness_warned = false;
  } else if (!s.liveness_warned && s.clock - s.last_progress > s.options.liveness_wait_s) {
    s.liveness_warned = true;
    s.log.push_back("liveness: no firing for " + std::to_string(s.clock - s.last_progress) +
                    " s, waiting in marking " + dump_marking(net, s.marking));
  }

  result.state = std::move(state);
  return result;
}

std::string run_report_to_json(const RunReport& r) {
  nlohmann::json doc = {{"ruleCounts",
                         {{"r1", r.rule_counts.r1},
                          {"r2", r.rule_counts.r2},
                          {"r3", r.rule_counts.r3},
                          {"hidden", r.rule_counts.hidden}}},
                        {"violations", r.violations},
                        {"cycles", r.cycles},
                        {"deadlocked", r.deadlocked},
                        {"diagnostic", r.diagnostic},
                        {"warnings", r.warnings}};
  return doc.dump(2) + "\n";
}

SubstitutedRun run_substituted(std::shared_ptr<const LabeledPetriNet> net,
                               std::shared_ptr<const NapModel> model, const PlantConfig& plant_cfg,
                               double duration_s, ControllerOptions options) {
  std::set<std::string> in_addrs, out_addrs;
  for (const auto& t : net->transitions()) {
    if (!t.label) continue;
    for (const auto& c : split_activity(*t.label))
      (t.cls == TransitionClass::Input ? in_addrs : out_addrs).insert(c.address);
  }
  for (const auto& a : out_addrs)
    if (a != wiring::kInv && a != wiring::kOutv)
      throw ValidationError("net drives " + a + ", which is not wired to a tank actuator");
  for (const auto& a : in_addrs) wiring::sensor_value(a, SensorReading{});

  ControllerState state = make_controller(net, std::move(model), options);
  TankPlant plant(plant_cfg);
  std::map<std::string, bool> prev_inputs;
  std::map<std::string, bool> outputs;
  for (const auto& a : in_addrs) prev_inputs[a] = false;
  for (const auto& a : out_addrs) outputs[a] = false;

  SubstitutedRun run;
  const Tick n = ticks_for(duration_s, plant_cfg.dt);
  for (Tick k = 0; k < n; ++k) {
    const PlantState& ps = plant.state();
    Observation obs;
    obs.clock = static_cast<double>(k) * plant_cfg.dt;
    for (const auto& a : in_addrs) {
      const bool v = wiring::sensor_value(a, ps.sensors);
      run.io_log.push_back({k, a, v, SignalClass::Input});
      const auto comp = format_component({a, v});
      obs.image.insert(comp);
      if (v != prev_inputs[a]) obs.changes.insert(comp);
      prev_inputs[a] = v;
    }
    auto res = control_step(std::move(state), obs);
    state = std::move(res.state);
    for (const auto& [addr, v] : res.commands) outputs[addr] = v;
    for (const auto& [addr, v] : outputs) run.io_log.push_back({k, addr, v, SignalClass::Output});

    const Actuators act{outputs[std::string(wiring::kInv)], outputs[std::string(wiring::kOutv)]};
    run.trajectory.push_back({k, obs.clock, ps.level, ps.sensors, act});
    if (state.deadlocked) {
      run.report.diagnostic = state.log.back();
      break;
    }
    plant.step(act.inv, act.outv);
  }

  run.report.rule_counts = state.rule_counts;
  run.report.violations = state.violations;
  run.report.cycles = state.cycles;
  run.report.deadlocked = state.deadlocked;
  for (const auto& line : state.log)
    if (line != run.report.diagnostic) run.report.warnings.push_back(line);
  return run;
}

namespace {

std::vector<Tick> switch_ticks(const Trajectory& t) {
  std::vector<Tick> out;
  Actuators prev{};
  for (const auto& p : t) {
    if (p.actuators != prev) out.push_back(p.tick);
    prev = p.actuators;
  }
  return out;
}

std::vector<std::string> activities(std::span<const IOSample> io) {
  std::vector<std::string> out;
  for (auto& e : reduce_log(io)) out.push_back(std::move(e.activity));
  return out;
}

}  // namespace

TrajectoryComparison compare_trajectories(const Trajectory& a, std::span<const IOSample> io_a,
                                          const Trajectory& b, std::span<const IOSample> io_b) {
  if (a.size() != b.size())
    throw ComparisonError("trajectories have " + std::to_string(a.size()) + " and " +
                          std::to_string(b.size()) + " ticks");
  TrajectoryComparison out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].tick != b[i].tick || std::abs(a[i].time_s - b[i].time_s) > 1e-9)
      throw ComparisonError("trajectories disagree on tick spacing at row " + std::to_string(i));
    out.max_level_diff = std::max(out.max_level_diff, std::abs(a[i].level - b[i].level));
  }
  const auto sa = switch_ticks(a), sb = switch_ticks(b);
  out.switch_count_equal = sa.size() == sb.size();
  for (std::size_t i = 0; i < std::min(sa.size(), sb.size()); ++i)
    out.switch_tick_diffs.push_back(static_cast<long>(sb[i] - sa[i]));
  out.event_sequence_equal = activities(io_a) == activities(io_b);
  return out;
}

std::vector<std::vector<std::string>> cycle_sequences(std::span<const IOSample> io_log,
                                                      std::string_view reset) {
  const auto events = reduce_log(io_log);
  const auto log = split_traces(events, reset);
  std::vector<std::vector<std::string>> out;
  for (const auto& t : complete_traces(log)) {
    std::vector<std::string> seq;
    for (const auto& e : t.events) seq.push_back(e.activity);
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace plcmine
