#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "plcmine/dream_nap.hpp"
#include "plcmine/event_log.hpp"
#include "plcmine/petri_net.hpp"
#include "plcmine/plant.hpp"

namespace plcmine {

struct EnabledSets {
  std::vector<std::size_t> inputs;
  std::vector<std::size_t> outputs;
  std::vector<std::size_t> hidden;
};

/// Partitions the enabled transitions by class.
EnabledSets classify_enabled(const LabeledPetriNet& net, const Marking& m);

enum class Decision {
  Idle,    // nothing enabled
  Hidden,  // only hidden transitions enabled
  Rule1,   // only %I (possibly with hidden routing): await an input
  Rule2,   // exactly one %Q and nothing else
  Rule3,   // a %Q competes with another %Q, an %I, or a hidden end route
};

Decision classify_round(const EnabledSets& sets);
Decision classify_round(const LabeledPetriNet& net, const Marking& m);

struct RuleCounts {
  long r1 = 0;
  long r2 = 0;
  long r3 = 0;
  long hidden = 0;
  friend bool operator==(const RuleCounts&, const RuleCounts&) = default;
};

/// Decision classes met at every marking reached while replaying `traces`
/// (before each event and after the last one).
RuleCounts audit_decisions(const LabeledPetriNet& net, std::span<const Trace> traces);

struct ControllerOptions {
  /// Throw ValidationError on an unexpected input instead of logging it.
  bool strict = false;
  /// Seconds spent waiting without any firing before a liveness warning.
  double liveness_wait_s = 120.0;
  /// Upper bound on decision rounds in one tick.
  int max_rounds_per_tick = 64;
};

struct ControllerState {
  std::shared_ptr<const LabeledPetriNet> net;
  std::shared_ptr<const NapModel> model;  // may be null
  ControllerOptions options;

  Marking marking;
  PlaceTracker tracker;
  double clock = 0.0;
  double last_progress = 0.0;
  std::map<std::string, bool> output_image;

  bool synchronised = false;
  bool deadlocked = false;
  bool liveness_warned = false;
  RuleCounts rule_counts;
  long violations = 0;
  long cycles = 0;
  std::vector<std::string> log;
};

ControllerState make_controller(std::shared_ptr<const LabeledPetriNet> net,
                                std::shared_ptr<const NapModel> model,
                                ControllerOptions options = {});

/// What the controller sees in one tick: the input components that changed
/// and the full current input image as components.
struct Observation {
  std::set<std::string> changes;
  std::set<std::string> image;
  double clock = 0.0;
};

struct ControlResult {
  ControllerState state;
  std::map<std::string, bool> commands;
};

/// Runs decision rounds until the controller has to wait for the plant:
/// hidden-only markings fire eagerly, a lone %Q fires (Rule 2), only-%I
/// markings consume a matching observed change (Rule 1), and every other
/// marking asks the predictor (Rule 3) and fires, waits, or closes the cycle.
/// Reaching the final marking, or an END prediction, starts a new cycle from
/// the initial marking.
///
/// Until the first firing, an %I transition also matches when its components
/// are all present in the current input image, which synchronises a freshly
/// started controller with a plant sitting in its reset state.
///
/// Throws ConfigurationError when Rule 3 is reached without a model, and
/// ValidationError on a conformance violation in strict mode.
ControlResult control_step(ControllerState state, const Observation& obs);

struct RunReport {
  RuleCounts rule_counts;
  long violations = 0;
  long cycles = 0;
  bool deadlocked = false;
  std::string diagnostic;
  std::vector<std::string> warnings;
};

std::string run_report_to_json(const RunReport& report);

struct SubstitutedRun {
  Trajectory trajectory;
  std::vector<IOSample> io_log;
  RunReport report;
};

/// Closes the loop between the approximate controller and the tank plant.
/// Input and output addresses are the ones appearing in the net's labels.
SubstitutedRun run_substituted(std::shared_ptr<const LabeledPetriNet> net,
                               std::shared_ptr<const NapModel> model, const PlantConfig& plant,
                               double duration_s, ControllerOptions options = {});

struct TrajectoryComparison {
  double max_level_diff = 0.0;
  std::vector<long> switch_tick_diffs;
  bool switch_count_equal = true;
  bool event_sequence_equal = false;
};

/// Pointwise level difference, per-switch tick offsets (i-th actuator change
/// in one run against the i-th in the other) and equality of the activity
/// sequences reduced from the two IO logs. Throws ComparisonError when the
/// trajectories differ in length or tick spacing.
TrajectoryComparison compare_trajectories(const Trajectory& a, std::span<const IOSample> io_a,
                                          const Trajectory& b, std::span<const IOSample> io_b);

/// Activity sequences of the complete cycles in an IO log.
std::vector<std::vector<std::string>> cycle_sequences(std::span<const IOSample> io_log,
                                                      std::string_view reset);

}  // namespace plcmine
