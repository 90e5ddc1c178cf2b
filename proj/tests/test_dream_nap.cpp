#include <doctest.h>

#include "fixtures.hpp"
#include "plcmine/discovery.hpp"
#include "plcmine/dream_nap.hpp"
#include "plcmine/errors.hpp"
#include "plcmine/scenario.hpp"

using namespace plcmine;

TEST_CASE("linear decay") {
  DecayParams p{1.0, {10.0}};
  CHECK(decay_value(p, 0, 3.0, 3.0) == doctest::Approx(1.0));
  CHECK(decay_value(p, 0, 4.0, 0.0) == doctest::Approx(0.6));
  CHECK(decay_value(p, 0, 10.0, 0.0) == 0.0);
  CHECK(decay_value(p, 0, 25.0, 0.0) == 0.0);
  CHECK(decay_value(p, 0, 5.0, std::nullopt) == 0.0);
  CHECK_THROWS(DecayParams{1.0, {0.0}}.validate(1));
  CHECK_THROWS(DecayParams{1.0, {1.0}}.validate(2));
}

TEST_CASE("sampling yields one sample per event plus the end") {
  using fixtures::A;
  using fixtures::B;
  const std::vector<Trace> traces{fixtures::trace({A, B}), fixtures::trace({A, B}, 10)};
  const auto net = discover_net(traces);
  const auto params = estimate_decay_params(net, traces, 0.1);
  const auto set = sample_log(net, traces, params, 0.1);
  CHECK(set.samples.size() == 6);
  CHECK(set.skipped_traces == 0);
  CHECK(set.samples[0].label == A);
  CHECK(set.samples[1].label == B);
  CHECK(set.samples[2].label == kEndLabel);
  CHECK(set.samples[0].features().size() == 3 * static_cast<long>(net.num_places()));
}

TEST_CASE("loop decisions differ in their token counters") {
  const auto spec = make_scenario("scenario2");
  const auto run = run_closed_loop(spec.program, spec.plant, spec.duration_s);
  const auto log = convert_io_log(run.io_log, spec);
  const auto net = discover_from_log(log);
  const auto split = chronological_split(log, 17, 5);
  const auto params = estimate_decay_params(net, split.train, 0.1);
  const auto set = sample_log(net, split.train, params, 0.1);
  std::size_t expected = 0;
  for (const auto& t : split.train) expected += t.events.size() + 1;
  CHECK(set.samples.size() == expected);

  // Same marking, different labels: the counters must tell them apart.
  bool found = false;
  for (std::size_t i = 0; i < set.samples.size() && !found; ++i)
    for (std::size_t j = i + 1; j < set.samples.size() && !found; ++j) {
      const auto& a = set.samples[i];
      const auto& b = set.samples[j];
      if (a.marking == b.marking && a.label != b.label) {
        CHECK(a.counts != b.counts);
        found = true;
      }
    }
  CHECK(found);
}

TEST_CASE("training separates a toy problem and is seeded") {
  std::vector<TimedStateSample> samples;
  for (int i = 0; i < 40; ++i) {
    TimedStateSample s;
    s.decay = Eigen::VectorXd::Constant(1, i % 2 ? 0.9 : 0.1);
    s.counts = Eigen::VectorXi::Constant(1, i % 2);
    s.marking = Eigen::VectorXi::Constant(1, 1);
    s.label = i % 2 ? "%QX0.0_true" : std::string(kEndLabel);
    samples.push_back(s);
  }
  TrainConfig cfg;
  cfg.seed = 3;
  const DecayParams decay{1.0, {5.0}};
  const auto model = train_nap(samples, {"%QX0.0_true"}, decay, cfg);
  CHECK(accuracy(model, samples) == 1.0);
  const auto again = train_nap(samples, {"%QX0.0_true"}, decay, cfg);
  CHECK(nap_model_to_json(model) == nap_model_to_json(again));

  const auto ranked = predict_next(model, samples[1]);
  CHECK(ranked.front().first == "%QX0.0_true");
  double total = 0;
  for (const auto& [label, p] : ranked) total += p;
  CHECK(total == doctest::Approx(1.0));

  auto bad = samples;
  bad[3].decay = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(train_nap(bad, {"%QX0.0_true"}, decay, cfg), DataError);
  bad = samples;
  bad[0].label = "%QX0.1_true";
  CHECK_THROWS(train_nap(bad, {"%QX0.0_true"}, decay, cfg));
}

TEST_CASE("model JSON round-trips") {
  std::vector<TimedStateSample> samples;
  for (int i = 0; i < 8; ++i) {
    TimedStateSample s;
    s.decay = Eigen::VectorXd::Constant(1, 0.1 * i);
    s.counts = Eigen::VectorXi::Constant(1, i);
    s.marking = Eigen::VectorXi::Constant(1, i % 2);
    s.label = i % 2 ? "%QX0.0_true" : std::string(kEndLabel);
    samples.push_back(s);
  }
  TrainConfig cfg;
  cfg.epochs = 3;
  const auto model = train_nap(samples, {"%QX0.0_true"}, DecayParams{1.0, {2.0}}, cfg);
  const auto text = nap_model_to_json(model);
  const auto back = nap_model_from_json(text);
  CHECK(nap_model_to_json(back) == text);
  for (const auto& s : samples) CHECK(predict_next(back, s) == predict_next(model, s));
  CHECK_THROWS_AS(nap_model_from_json("{}"), ParseError);
}
