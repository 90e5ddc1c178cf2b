#include "plcmine/dream_nap.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "plcmine/replay.hpp"

namespace plcmine {

void DecayParams::validate(std::size_t places) const {
  if (!(beta > 0.0)) throw DataError("decay beta must be positive");
  if (horizon.size() != places) throw DimensionError("decay horizon needs one entry per place");
  for (double h : horizon)
    if (!(h > 0.0)) throw DataError("decay horizons must be positive");
}

double decay_value(const DecayParams& params, std::size_t place, double t_now,
                   std::optional<double> t_last) {
  if (!t_last) return 0.0;
  const double elapsed = t_now - *t_last;
  return params.beta * std::max(0.0, 1.0 - elapsed / params.horizon.at(place));
}

Eigen::VectorXd TimedStateSample::features() const {
  Eigen::VectorXd f(decay.size() + counts.size() + marking.size());
  f << decay, counts.cast<double>(), marking.cast<double>();
  return f;
}

PlaceTracker::PlaceTracker(const LabeledPetriNet& net) { begin(net); }

void PlaceTracker::begin(const LabeledPetriNet& net) {
  marking_ = net.initial_marking();
  counts_.assign(net.num_places(), 0);
  last_.assign(net.num_places(), std::nullopt);
  pending_ = true;
}

void PlaceTracker::stamp_pending(double t_now) {
  if (!pending_) return;
  pending_ = false;
  for (std::size_t p = 0; p < marking_.size(); ++p)
    if (marking_[p] > 0) {
      counts_[p] += marking_[p];
      last_[p] = t_now;
    }
}

void PlaceTracker::fire(const LabeledPetriNet& net, std::size_t transition, double t_now) {
  stamp_pending(t_now);
  marking_ = plcmine::fire(net, marking_, transition);
  for (auto p : net.postset(transition)) {
    ++counts_[p];
    last_[p] = t_now;
  }
}

TimedStateSample PlaceTracker::snapshot(const DecayParams& params, double t_now,
                                        std::string label) {
  stamp_pending(t_now);
  const auto n = static_cast<Eigen::Index>(marking_.size());
  TimedStateSample s;
  s.decay.resize(n);
  s.counts.resize(n);
  s.marking.resize(n);
  for (Eigen::Index p = 0; p < n; ++p) {
    const auto i = static_cast<std::size_t>(p);
    s.decay(p) = decay_value(params, i, t_now, last_[i]);
    s.counts(p) = counts_[i];
    s.marking(p) = marking_[i];
  }
  s.label = std::move(label);
  s.time_s = t_now;
  return s;
}

DecayParams estimate_decay_params(const LabeledPetriNet& net, std::span<const Trace> traces,
                                  double dt, double beta) {
  const auto np = net.num_places();
  std::vector<double> interval_sum(np, 0.0);
  std::vector<int> interval_count(np, 0);
  double longest = 0.0;

  for (const auto& trace : traces) {
    if (trace.events.empty()) continue;
    const auto replay = replay_trace(net, trace);
    if (replay.missing_tokens > 0) continue;
    const double t0 = static_cast<double>(trace.events.front().tick) * dt;
    const double t1 = static_cast<double>(trace.events.back().tick) * dt;
    longest = std::max(longest, t1 - t0);

    std::vector<std::optional<double>> last(np);
    for (std::size_t p = 0; p < np; ++p)
      if (net.initial_marking()[p] > 0) last[p] = t0;
    std::size_t next_event = 0;
    for (const auto& step : replay.fired_sequence) {
      if (step.event_index) next_event = *step.event_index;
      const double t = static_cast<double>(
                           trace.events[std::min(next_event, trace.events.size() - 1)].tick) * dt;
      for (auto p : net.postset(step.transition)) {
        if (last[p]) {
          interval_sum[p] += t - *last[p];
          ++interval_count[p];
        }
        last[p] = t;
      }
    }
  }

  if (!(longest > 0.0)) longest = dt;
  DecayParams params;
  params.beta = beta;
  params.horizon.resize(np);
  for (std::size_t p = 0; p < np; ++p) {
    const double mean = interval_count[p] > 0 ? interval_sum[p] / interval_count[p] : 0.0;
    params.horizon[p] = mean > 0.0 ? 2.0 * mean : longest;
  }
  return params;
}

SampleSet sample_log(const LabeledPetriNet& net, std::span<const Trace> traces,
                     const DecayParams& params, double dt) {
  params.validate(net.num_places());
  SampleSet out;
  PlaceTracker tracker(net);
  for (const auto& trace : traces) {
    if (trace.events.empty()) continue;
    ReplayResult replay;
    try {
      replay = replay_trace(net, trace);
    } catch (const UnknownActivityError&) {
      ++out.skipped_traces;
      continue;
    }
    if (replay.missing_tokens > 0) {
      ++out.skipped_traces;
      continue;
    }
    tracker.begin(net);
    const auto time_of = [&](std::size_t k) {
      return static_cast<double>(trace.events[k].tick) * dt;
    };
    const double t_end = time_of(trace.events.size() - 1);
    std::size_t done = 0;
    bool end_emitted = false;
    for (const auto& step : replay.fired_sequence) {
      if (step.event_index) {
        const auto k = *step.event_index;
        out.samples.push_back(tracker.snapshot(params, time_of(k), trace.events[k].activity));
        tracker.fire(net, step.transition, time_of(k));
        done = k + 1;
        continue;
      }
      if (done == trace.events.size() && !end_emitted) {
        out.samples.push_back(tracker.snapshot(params, t_end, std::string(kEndLabel)));
        end_emitted = true;
      }
      tracker.fire(net, step.transition, done < trace.events.size() ? time_of(done) : t_end);
    }
    if (!end_emitted) out.samples.push_back(tracker.snapshot(params, t_end, std::string(kEndLabel)));
  }
  return out;
}

std::string NapModel::label_of(std::size_t index) const {
  if (index == activities.size()) return std::string(kEndLabel);
  return activities.at(index);
}

std::optional<std::size_t> NapModel::index_of(std::string_view label) const {
  if (label == kEndLabel) return activities.size();
  const auto it = std::lower_bound(activities.begin(), activities.end(), label);
  if (it == activities.end() || *it != label) return std::nullopt;
  return static_cast<std::size_t>(it - activities.begin());
}

std::vector<std::string> activity_vocabulary(const LabeledPetriNet& net) {
  std::set<std::string> labels;
  for (const auto& t : net.transitions())
    if (t.label) labels.insert(*t.label);
  return {labels.begin(), labels.end()};
}

namespace {

Eigen::MatrixXd normalised_features(const NapModel& model,
                                    std::span<const TimedStateSample> samples) {
  const auto width = model.feature_mean.size();
  Eigen::MatrixXd x(width, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const auto f = samples[j].features();
    if (f.size() != width)
      throw DataError("sample has " + std::to_string(f.size()) + " features, model expects " +
                      std::to_string(width));
    x.col(static_cast<Eigen::Index>(j)) =
        (f - model.feature_mean).cwiseQuotient(model.feature_scale);
  }
  return x;
}

}  // namespace

NapModel train_nap(std::span<const TimedStateSample> samples, std::vector<std::string> vocabulary,
                   const DecayParams& decay, const TrainConfig& cfg) {
  if (samples.empty()) throw DataError("no training samples");
  if (cfg.epochs < 0 || cfg.batch_size <= 0) throw DataError("invalid training configuration");
  std::sort(vocabulary.begin(), vocabulary.end());
  vocabulary.erase(std::unique(vocabulary.begin(), vocabulary.end()), vocabulary.end());

  NapModel model;
  model.activities = std::move(vocabulary);
  model.decay = decay;

  const auto width = samples.front().features().size();
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd raw(width, n);
  std::vector<int> labels(samples.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& s = samples[static_cast<std::size_t>(j)];
    const auto f = s.features();
    if (f.size() != width || s.decay.size() != s.counts.size() ||
        s.counts.size() != s.marking.size())
      throw DataError("training samples disagree on vector dimensions");
    raw.col(j) = f;
    const auto idx = model.index_of(s.label);
    if (!idx) throw DataError("sample label '" + s.label + "' is not an activity of the net");
    labels[static_cast<std::size_t>(j)] = static_cast<int>(*idx);
  }

  model.feature_mean = raw.rowwise().mean();
  const Eigen::MatrixXd centred = raw.colwise() - model.feature_mean;
  model.feature_scale = (centred.array().square().rowwise().sum() / static_cast<double>(n)).sqrt();
  for (Eigen::Index i = 0; i < width; ++i)
    if (model.feature_scale(i) < 1e-12) model.feature_scale(i) = 1.0;
  const Eigen::MatrixXd x = centred.array().colwise() / model.feature_scale.array();

  std::vector<int> sizes{static_cast<int>(width)};
  if (cfg.hidden_sizes.empty()) {
    sizes.push_back(2 * static_cast<int>(width));
    sizes.push_back(2 * static_cast<int>(width));
  } else {
    sizes.insert(sizes.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
  }
  sizes.push_back(static_cast<int>(model.num_classes()));
  model.network = Mlp<double>(sizes, cfg.seed);

  Mlp<double>::Gradients grad, velocity;
  for (const auto& w : model.network.weights())
    velocity.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : model.network.biases())
    velocity.biases.push_back(Eigen::VectorXd::Zero(b.size()));

  Rng shuffle_rng(derive_seed(cfg.seed, 7));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const auto stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      Eigen::MatrixXd xb(width, static_cast<Eigen::Index>(stop - start));
      std::vector<int> yb;
      for (std::size_t k = start; k < stop; ++k) {
        xb.col(static_cast<Eigen::Index>(k - start)) = x.col(order[k]);
        yb.push_back(labels[static_cast<std::size_t>(order[k])]);
      }
      model.network.loss_and_gradient(xb, yb, grad);
      for (std::size_t l = 0; l < grad.weights.size(); ++l) {
        velocity.weights[l] = cfg.momentum * velocity.weights[l] + grad.weights[l];
        velocity.biases[l] = cfg.momentum * velocity.biases[l] + grad.biases[l];
      }
      model.network.apply(velocity, cfg.learning_rate);
    }
  }

  model.meta.epochs = cfg.epochs;
  model.meta.learning_rate = cfg.learning_rate;
  model.meta.seed = cfg.seed;
  model.meta.train_accuracy = accuracy(model, samples);
  return model;
}

std::vector<std::pair<std::string, double>> predict_next(const NapModel& model,
                                                         const TimedStateSample& sample) {
  const auto probs = model.network.predict(normalised_features(model, {&sample, 1}));
  std::vector<std::size_t> idx(static_cast<std::size_t>(probs.rows()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return probs(static_cast<Eigen::Index>(a), 0) > probs(static_cast<Eigen::Index>(b), 0);
  });
  std::vector<std::pair<std::string, double>> out;
  for (auto i : idx) out.emplace_back(model.label_of(i), probs(static_cast<Eigen::Index>(i), 0));
  return out;
}

double accuracy(const NapModel& model, std::span<const TimedStateSample> samples) {
  if (samples.empty()) return 0.0;
  const auto probs = model.network.predict(normalised_features(model, samples));
  std::size_t hits = 0;
  for (Eigen::Index j = 0; j < probs.cols(); ++j) {
    Eigen::Index best = 0;
    probs.col(j).maxCoeff(&best);
    if (model.label_of(static_cast<std::size_t>(best)) == samples[static_cast<std::size_t>(j)].label)
      ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

namespace {

using nlohmann::json;

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string nap_model_to_json(const NapModel& model) {
  json weights = json::array(), biases = json::array();
  for (const auto& w : model.network.weights()) {
    std::vector<double> row_major;
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) row_major.push_back(w(r, c));
    weights.push_back(row_major);
  }
  for (const auto& b : model.network.biases()) biases.push_back(vector_json(b));
  json meta = {{"epochs", model.meta.epochs},
               {"learning_rate", model.meta.learning_rate},
               {"seed", model.meta.seed},
               {"train_accuracy", model.meta.train_accuracy},
               {"test_accuracy", model.meta.test_accuracy ? json(*model.meta.test_accuracy)
                                                          : json(nullptr)}};
  json doc = {{"layer_sizes", model.network.layer_sizes()},
              {"weights", std::move(weights)},
              {"biases", std::move(biases)},
              {"activities", model.activities},
              {"end_label", std::string(kEndLabel)},
              {"normalization", {{"mean", vector_json(model.feature_mean)},
                                 {"scale", vector_json(model.feature_scale)}}},
              {"decay", {{"beta", model.decay.beta}, {"horizon", model.decay.horizon}}},
              {"training", std::move(meta)}};
  return doc.dump(2) + "\n";
}

NapModel nap_model_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  try {
    NapModel model;
    const auto sizes = doc.at("layer_sizes").get<std::vector<int>>();
    const auto& wj = doc.at("weights");
    const auto& bj = doc.at("biases");
    if (sizes.size() < 2 || wj.size() != sizes.size() - 1 || bj.size() != sizes.size() - 1)
      throw ParseError("model: layer count mismatch");
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
      const auto flat = wj[l].get<std::vector<double>>();
      if (flat.size() != static_cast<std::size_t>(sizes[l]) * static_cast<std::size_t>(sizes[l + 1]))
        throw ParseError("model: weight matrix " + std::to_string(l) + " has the wrong size");
      Eigen::MatrixXd w(sizes[l + 1], sizes[l]);
      for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c)
          w(r, c) = flat[static_cast<std::size_t>(r * w.cols() + c)];
      weights.push_back(std::move(w));
      biases.push_back(vector_from(bj[l]));
    }
    model.network = Mlp<double>(std::move(weights), std::move(biases));
    model.activities = doc.at("activities").get<std::vector<std::string>>();
    if (!std::is_sorted(model.activities.begin(), model.activities.end()))
      throw ParseError("model: activities are not sorted");
    if (static_cast<std::size_t>(model.network.outputs()) != model.num_classes())
      throw ParseError("model: output width does not match activities + END");
    model.feature_mean = vector_from(doc.at("normalization").at("mean"));
    model.feature_scale = vector_from(doc.at("normalization").at("scale"));
    if (model.feature_mean.size() != model.network.inputs() ||
        model.feature_scale.size() != model.network.inputs())
      throw ParseError("model: normalisation width does not match input layer");
    model.decay.beta = doc.at("decay").at("beta").get<double>();
    model.decay.horizon = doc.at("decay").at("horizon").get<std::vector<double>>();
    const auto& t = doc.at("training");
    model.meta.epochs = t.at("epochs").get<int>();
    model.meta.learning_rate = t.at("learning_rate").get<double>();
    model.meta.seed = t.at("seed").get<std::uint64_t>();
    model.meta.train_accuracy = t.at("train_accuracy").get<double>();
    if (!t.at("test_accuracy").is_null()) model.meta.test_accuracy = t.at("test_accuracy").get<double>();
    return model;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  } catch (const DataError& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

void write_nap_model(const NapModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << nap_model_to_json(model);
}

NapModel read_nap_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return nap_model_from_json(ss.str());
}

void write_samples_csv(std::span<const TimedStateSample> samples,
                       const std::vector<std::string>& places, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "time_s,label";
  for (const char* prefix : {"decay", "count", "mark"})
    for (const auto& p : places) out << ',' << prefix << ':' << p;
  out << '\n';
  out.precision(17);
  for (const auto& s : samples) {
    out << s.time_s << ',' << s.label;
    for (Eigen::Index i = 0; i < s.decay.size(); ++i) out << ',' << s.decay(i);
    for (Eigen::Index i = 0; i < s.counts.size(); ++i) out << ',' << s.counts(i);
    for (Eigen::Index i = 0; i < s.marking.size(); ++i) out << ',' << s.marking(i);
    out << '\n';
  }
}

}  // namespace plcmine
