#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "plcmine/event_log.hpp"
#include "plcmine/mlp.hpp"
#include "plcmine/petri_net.hpp"

namespace plcmine {

/// Label used for the "trace ends here" prediction class.
inline constexpr std::string_view kEndLabel = "END";

struct DecayParams {
  double beta = 1.0;
  std::vector<double> horizon;  // T_p per place, seconds

  void validate(std::size_t places) const;
};

/// beta * max(0, 1 - (now - last) / T_p), or 0 when no token ever entered.
double decay_value(const DecayParams& params, std::size_t place, double t_now,
                   std::optional<double> t_last);

struct TimedStateSample {
  Eigen::VectorXd decay;
  Eigen::VectorXi counts;
  Eigen::VectorXi marking;
  std::string label;
  double time_s = 0.0;

  /// [decay; counts; marking] as one feature column.
  Eigen::VectorXd features() const;
};

/// Per-place token-entry bookkeeping shared by sampling and the controller.
///
/// Tokens of the initial marking are stamped lazily at the first snapshot or
/// firing after `begin`, so a cycle's clock starts at its first event.
class PlaceTracker {
 public:
  PlaceTracker() = default;
  explicit PlaceTracker(const LabeledPetriNet& net);

  void begin(const LabeledPetriNet& net);
  void fire(const LabeledPetriNet& net, std::size_t transition, double t_now);
  TimedStateSample snapshot(const DecayParams& params, double t_now, std::string label);

  const Marking& marking() const { return marking_; }
  const std::vector<int>& counts() const { return counts_; }
  const std::vector<std::optional<double>>& last_entry() const { return last_; }

 private:
  void stamp_pending(double t_now);

  Marking marking_;
  std::vector<int> counts_;
  std::vector<std::optional<double>> last_;
  bool pending_ = false;
};

/// Horizon per place: twice the mean interval between token entries observed
/// while replaying `traces`; places never re-entered within a trace get the
/// longest trace duration. Non-fitting traces are ignored.
DecayParams estimate_decay_params(const LabeledPetriNet& net, std::span<const Trace> traces,
                                  double dt, double beta = 1.0);

struct SampleSet {
  std::vector<TimedStateSample> samples;
  int skipped_traces = 0;
};

/// Replays each trace and snapshots the state immediately before every event's
/// labeled firing (label = that event's activity), plus one END sample after
/// the last event. Traces needing forced tokens are skipped and counted.
SampleSet sample_log(const LabeledPetriNet& net, std::span<const Trace> traces,
                     const DecayParams& params, double dt);

struct TrainConfig {
  int epochs = 50;
  double learning_rate = 0.1;
  double momentum = 0.9;
  int batch_size = 16;
  std::uint64_t seed = 1;
  std::vector<int> hidden_sizes;  // empty: two layers of 2 * input width
};

struct TrainingMeta {
  int epochs = 0;
  double learning_rate = 0.0;
  std::uint64_t seed = 0;
  double train_accuracy = 0.0;
  std::optional<double> test_accuracy;
};

struct NapModel {
  std::vector<std::string> activities;  // output index -> activity; END is last
  Eigen::VectorXd feature_mean;
  Eigen::VectorXd feature_scale;
  DecayParams decay;
  Mlp<double> network;
  TrainingMeta meta;

  std::size_t num_classes() const { return activities.size() + 1; }
  std::string label_of(std::size_t index) const;
  std::optional<std::size_t> index_of(std::string_view label) const;
};

/// Activity vocabulary of a net: sorted distinct transition labels.
std::vector<std::string> activity_vocabulary(const LabeledPetriNet& net);

/// Trains the classifier on z-normalised features with shuffled mini-batch
/// gradient descent. Throws DataError for an empty set or mismatched
/// dimensions, or for labels outside `vocabulary` + END.
NapModel train_nap(std::span<const TimedStateSample> samples,
                   std::vector<std::string> vocabulary, const DecayParams& decay,
                   const TrainConfig& cfg);

/// Probability per activity (END included), sorted descending; ties keep
/// output-index order.
std::vector<std::pair<std::string, double>> predict_next(const NapModel& model,
                                                         const TimedStateSample& sample);

double accuracy(const NapModel& model, std::span<const TimedStateSample> samples);

std::string nap_model_to_json(const NapModel& model);
NapModel nap_model_from_json(std::string_view text);
void write_nap_model(const NapModel& model, const std::filesystem::path& path);
NapModel read_nap_model(const std::filesystem::path& path);

/// CSV with columns time_s,label,decay_<i>...,count_<i>...,mark_<i>...
void write_samples_csv(std::span<const TimedStateSample> samples,
                       const std::vector<std::string>& places, const std::filesystem::path& path);

}  // namespace plcmine
