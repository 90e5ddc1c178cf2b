#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plcmine/controller.hpp"
#include "plcmine/discovery.hpp"
#include "plcmine/dream_nap.hpp"
#include "plcmine/event_log.hpp"
#include "plcmine/ladder.hpp"
#include "plcmine/plant.hpp"

namespace plcmine {

/// LLS exposed: the tank is almost empty and a new process cycle begins.
inline constexpr std::string_view kResetActivity = "%IX0.1_false";

/// Sub-seed streams derived from the scenario seed with derive_seed().
inline constexpr std::uint64_t kPlantSeedStream = 0;
inline constexpr std::uint64_t kNetworkSeedStream = 1;

struct ScenarioSpec {
  std::string name;  // scenario1 | scenario2 | scenario3
  PlantConfig plant;
  LadderProgram program;
  double duration_s = 880.0;
  std::string reset{kResetActivity};
  std::uint64_t seed = 42;
};

/// scenario1 = (P1, C1), scenario2 = (P1, C2), scenario3 = (P2, C2).
ScenarioSpec make_scenario(std::string_view name, std::uint64_t seed = 42,
                           double duration_s = 880.0, double dt = 0.1);

/// IO log -> merged events -> traces, with metadata from the scenario.
EventLog convert_io_log(std::span<const IOSample> io_log, const ScenarioSpec& spec,
                        std::vector<std::string>* warnings = nullptr);

/// Nets are discovered from complete cycles only; the leading prefix and the
/// truncated tail of a recording are not whole cycles.
LabeledPetriNet discover_from_log(const EventLog& log, const DiscoveryConfig& cfg = {});

struct TraceSplit {
  std::vector<Trace> train;
  std::vector<Trace> test;
};

/// Chronological split over the complete traces: the last `test` traces are
/// held out and the `train` traces right before them are used for training.
TraceSplit chronological_split(const EventLog& log, int train, int test);

struct NapTraining {
  NapModel model;
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
  int skipped_traces = 0;
  double test_accuracy = 0.0;
};

NapTraining train_predictor(const LabeledPetriNet& net, const TraceSplit& split, double dt,
                            const TrainConfig& cfg);

struct PipelineOptions {
  DiscoveryConfig discovery;
  TrainConfig training;
  int train_traces = 17;
  int test_traces = 5;
  bool force_predictor = false;
};

struct PipelineReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string rng;
  long ticks = 0;
  long change_events = 0;
  long traces = 0;
  long complete_traces = 0;
  std::size_t places = 0;
  std::size_t transitions = 0;
  std::size_t arcs = 0;
  double replay_fitness = 0.0;  // share of complete traces replaying without forced tokens
  RuleCounts replay_decisions;
  bool predictor_required = false;
  long train_traces = 0;
  long test_traces = 0;
  std::optional<double> train_accuracy;
  std::optional<double> test_accuracy;
  std::vector<std::string> warnings;
};

std::string pipeline_report_to_json(const PipelineReport& r);

struct PipelineResult {
  ClosedLoopRun recording;
  EventLog log;
  DirectlyFollowsGraph dfg;
  LabeledPetriNet net;
  std::optional<NapTraining> predictor;
  PipelineReport report;
};

/// record -> convert -> discover -> (train when the replay meets a Rule-3
/// marking, or when forced).
PipelineResult run_pipeline(const ScenarioSpec& spec, const PipelineOptions& options);

struct ValidationReport {
  TrajectoryComparison comparison;
  RunReport substituted;
  long original_cycles = 0;
  long substituted_cycles = 0;
  bool cycles_equal = false;  // every complete cycle of C' also occurs in C and vice versa
  std::vector<int> original_fills_per_cycle;
  std::vector<int> substituted_fills_per_cycle;
  bool passed = false;
};

struct ValidationRun {
  ClosedLoopRun original;
  SubstitutedRun substituted;
  ValidationReport report;
};

/// Number of ULS rising events (%IX0.0_true) in each complete cycle.
std::vector<int> fills_per_cycle(std::span<const IOSample> io_log, std::string_view reset);

/// Runs the true controller and the substitute side by side on the scenario's
/// plant. Throws ValidationError when the net mentions addresses the
/// scenario's program does not have.
ValidationRun validate_substitution(const ScenarioSpec& spec,
                                    std::shared_ptr<const LabeledPetriNet> net,
                                    std::shared_ptr<const NapModel> model,
                                    ControllerOptions options = {});

std::string validation_report_to_json(const ValidationReport& r);

}  // namespace plcmine
