// plcmine: record, mine and substitute the tank-control PLC programs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "plcmine/controller.hpp"
#include "plcmine/discovery.hpp"
#include "plcmine/dream_nap.hpp"
#include "plcmine/errors.hpp"
#include "plcmine/net_json.hpp"
#include "plcmine/replay.hpp"
#include "plcmine/scenario.hpp"
#include "plcmine/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace plcmine;

namespace {

constexpr int kExitError = 1;
constexpr int kExitValidation = 2;

struct Options {
  std::string scenario = "scenario1";
  double duration = 880.0;
  double dt = 0.1;
  std::uint64_t seed = 42;
  std::string out_dir;
  double edge_filter = 0.0;
  int epochs = 50;
  std::string split = "17/5";
  bool strict = false;
  bool force_predictor = false;
  std::string plant_config;
  std::string program;
};

struct StageError : Error {
  StageError(const std::string& stage, const std::string& what) : Error(stage + ": " + what) {}
};

fs::path out_dir(const Options& o) {
  fs::path dir = o.out_dir.empty() ? fs::path("out") / o.scenario : fs::path(o.out_dir);
  fs::create_directories(dir);
  return dir;
}

ScenarioSpec scenario(const Options& o) {
  auto spec = make_scenario(o.scenario, o.seed, o.duration, o.dt);
  if (!o.plant_config.empty()) {
    spec.plant = read_plant_config(o.plant_config);
    spec.plant.seed = derive_seed(o.seed, kPlantSeedStream);
  }
  if (!o.program.empty()) spec.program = read_ladder(o.program);
  return spec;
}

std::pair<int, int> parse_split(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) throw ConfigurationError("--split expects TRAIN/TEST, e.g. 17/5");
  return {std::stoi(s.substr(0, slash)), std::stoi(s.substr(slash + 1))};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

int cmd_record(const Options& o) {
  const auto spec = scenario(o);
  const auto dir = out_dir(o);
  const auto run = stage("record", [&] { return run_closed_loop(spec.program, spec.plant, spec.duration_s); });
  write_io_log(run.io_log, dir / "io_log.csv");
  write_trajectory(run.trajectory, dir / "trajectory.csv");
  std::ofstream cfg(dir / "plant.cfg");
  write_plant_config(spec.plant, cfg);
  const auto events = reduce_log(run.io_log);
  std::cout << "ticks: " << run.trajectory.size() << "\nchange events: " << events.size()
            << "\nrng: " << kRngAlgorithm << "\n";
  return 0;
}

int cmd_convert(const Options& o) {
  const auto spec = scenario(o);
  const auto dir = out_dir(o);
  std::vector<std::string> warnings;
  const auto log = stage("convert", [&] {
    return convert_io_log(read_io_log(dir / "io_log.csv"), spec, &warnings);
  });
  write_event_log(log, dir / "event_log.json");
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "traces: " << log.traces.size() << "\ncomplete traces: " << complete_traces(log).size()
            << "\n";
  return 0;
}

int cmd_discover(const Options& o) {
  const auto dir = out_dir(o);
  DiscoveryConfig cfg{o.edge_filter};
  const auto log = stage("discover", [&] { return read_event_log(dir / "event_log.json"); });
  const auto net = stage("discover", [&] { return discover_from_log(log, cfg); });
  const auto complete = complete_traces(log);
  write_net(net, dir / "net.json");
  write_text(dir / "dfg.dot", dfg_to_dot(filter_dfg(build_dfg(complete), cfg)));
  long fitting = 0;
  for (const auto& t : complete) fitting += replay_trace(net, t).missing_tokens == 0;
  const auto audit = audit_decisions(net, complete);
  std::cout << "places: " << net.num_places() << "\ntransitions: " << net.num_transitions()
            << "\narcs: " << net.arcs().size() << "\nfitting traces: " << fitting << "/"
            << complete.size() << "\nrule-3 markings during replay: " << audit.r3 << "\n";
  return 0;
}

int cmd_train(const Options& o) {
  const auto spec = scenario(o);
  const auto dir = out_dir(o);
  const auto [train_n, test_n] = parse_split(o.split);
  const auto log = stage("train", [&] { return read_event_log(dir / "event_log.json"); });
  const auto net = stage("train", [&] { return read_net(dir / "net.json"); });
  TrainConfig cfg;
  cfg.epochs = o.epochs;
  cfg.seed = derive_seed(spec.seed, kNetworkSeedStream);
  const auto split = stage("train", [&] { return chronological_split(log, train_n, test_n); });
  const auto result = stage("train", [&] { return train_predictor(net, split, log.meta.dt_s, cfg); });
  write_nap_model(result.model, dir / "model.json");
  const auto samples = sample_log(net, split.train, result.model.decay, log.meta.dt_s);
  write_samples_csv(samples.samples, net.places(), dir / "samples.csv");
  std::cout << "train traces: " << split.train.size() << " (" << result.train_samples
            << " samples)\ntest traces: " << split.test.size() << " (" << result.test_samples
            << " samples)\ntrain accuracy: " << result.model.meta.train_accuracy
            << "\ntest accuracy: " << result.test_accuracy << "\n";
  return 0;
}

std::shared_ptr<const NapModel> load_model_if_present(const fs::path& dir) {
  if (!fs::exists(dir / "model.json")) return nullptr;
  return std::make_shared<const NapModel>(read_nap_model(dir / "model.json"));
}

int cmd_substitute(const Options& o) {
  const auto spec = scenario(o);
  const auto dir = out_dir(o);
  auto net = std::make_shared<const LabeledPetriNet>(stage("substitute", [&] { return read_net(dir / "net.json"); }));
  auto model = stage("substitute", [&] { return load_model_if_present(dir); });
  const auto run = stage("substitute", [&] {
    return run_substituted(net, model, spec.plant, spec.duration_s, ControllerOptions{o.strict});
  });
  write_trajectory(run.trajectory, dir / "substituted_trajectory.csv");
  write_io_log(run.io_log, dir / "substituted_io_log.csv");
  write_text(dir / "run_report.json", run_report_to_json(run.report));
  std::cout << run_report_to_json(run.report);
  return run.report.deadlocked ? kExitValidation : 0;
}

int cmd_validate(const Options& o) {
  const auto spec = scenario(o);
  const auto dir = out_dir(o);
  auto net = std::make_shared<const LabeledPetriNet>(stage("validate", [&] { return read_net(dir / "net.json"); }));
  auto model = stage("validate", [&] { return load_model_if_present(dir); });
  const auto v = validate_substitution(spec, net, model, ControllerOptions{o.strict});
  write_trajectory(v.original.trajectory, dir / "validation_original.csv");
  write_trajectory(v.substituted.trajectory, dir / "validation_substituted.csv");
  write_text(dir / "validation.json", validation_report_to_json(v.report));
  write_trajectory_svg({{"C (ladder)", &v.original.trajectory}, {"C' (mined)", &v.substituted.trajectory}},
                       spec.name + ": true vs substituted controller", dir / "validation.svg",
                       spec.plant.capacity);
  std::cout << validation_report_to_json(v.report);
  return v.report.passed ? 0 : kExitValidation;
}

int cmd_pipeline(const Options& o) {
  const auto spec = scenario(o);
  const auto dir = out_dir(o);
  PipelineOptions opts;
  opts.discovery.edge_filter_percentile = o.edge_filter;
  opts.training.epochs = o.epochs;
  std::tie(opts.train_traces, opts.test_traces) = parse_split(o.split);
  opts.force_predictor = o.force_predictor;
  const auto r = stage("pipeline", [&] { return run_pipeline(spec, opts); });

  write_io_log(r.recording.io_log, dir / "io_log.csv");
  write_trajectory(r.recording.trajectory, dir / "trajectory.csv");
  std::ofstream cfg(dir / "plant.cfg");
  write_plant_config(spec.plant, cfg);
  write_event_log(r.log, dir / "event_log.json");
  write_net(r.net, dir / "net.json");
  write_text(dir / "dfg.dot", dfg_to_dot(r.dfg));
  if (r.predictor) {
    write_nap_model(r.predictor->model, dir / "model.json");
  } else {
    fs::remove(dir / "model.json");
  }
  write_text(dir / "report.json", pipeline_report_to_json(r.report));
  write_trajectory_svg({{spec.program.name, &r.recording.trajectory}}, spec.name + ": recorded run",
                       dir / "trajectory.svg", spec.plant.capacity);
  std::cout << pipeline_report_to_json(r.report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine a substitute controller from tapped PLC inputs and outputs"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "scenario1 | scenario2 | scenario3")
        ->check(CLI::IsMember({"scenario1", "scenario2", "scenario3"}));
    sub->add_option("--duration", o.duration, "recording length in seconds");
    sub->add_option("--dt", o.dt, "tick length in seconds");
    sub->add_option("--seed", o.seed, "scenario seed (plant noise, weight init)");
    sub->add_option("--out-dir", o.out_dir, "artifact directory (default out/<scenario>)");
    sub->add_option("--plant-config", o.plant_config, "key = value plant configuration file");
  };

  auto* record = app.add_subcommand("record", "run the ladder program against the plant");
  add_common(record);
  record->add_option("--program", o.program, "ladder program JSON instead of the built-in one");
  auto* convert = app.add_subcommand("convert", "IO log -> event log");
  add_common(convert);
  auto* discover = app.add_subcommand("discover", "event log -> Petri net");
  add_common(discover);
  discover->add_option("--edge-filter", o.edge_filter, "DFG edge percentile filter in [0, 1]");
  auto* train = app.add_subcommand("train", "train the next-activity predictor");
  add_common(train);
  train->add_option("--epochs", o.epochs);
  train->add_option("--split", o.split, "TRAIN/TEST complete traces");
  auto* substitute = app.add_subcommand("substitute", "drive the plant with the mined controller");
  add_common(substitute);
  substitute->add_flag("--strict", o.strict, "halt on the first unexpected input");
  auto* validate = app.add_subcommand("validate", "compare the true and the mined controller");
  add_common(validate);
  validate->add_flag("--strict", o.strict, "halt on the first unexpected input");
  auto* pipeline = app.add_subcommand("pipeline", "record, convert, discover and train in one go");
  add_common(pipeline);
  pipeline->add_option("--program", o.program, "ladder program JSON instead of the built-in one");
  pipeline->add_option("--edge-filter", o.edge_filter, "DFG edge percentile filter in [0, 1]");
  pipeline->add_option("--epochs", o.epochs);
  pipeline->add_option("--split", o.split, "TRAIN/TEST complete traces");
  pipeline->add_flag("--force-predictor", o.force_predictor, "train even without Rule-3 markings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*record) return cmd_record(o);
    if (*convert) return cmd_convert(o);
    if (*discover) return cmd_discover(o);
    if (*train) return cmd_train(o);
    if (*substitute) return cmd_substitute(o);
    if (*validate) return cmd_validate(o);
    if (*pipeline) return cmd_pipeline(o);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
