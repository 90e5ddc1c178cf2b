#include "plcmine/plant.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "plcmine/errors.hpp"

namespace plcmine {

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal(double mean, double std_dev) {
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean + std_dev * z;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void PlantConfig::validate() const {
  const auto& s = sensor_levels;
  if (!(0.0 < s.lls && s.lls < s.mls && s.mls < s.uls && s.uls < capacity))
    throw ConfigurationError("sensor levels must satisfy 0 < LLS < MLS < ULS < capacity");
  if (!(dt > 0.0)) throw ConfigurationError("dt must be positive");
  if (initial_level < 0.0 || initial_level > capacity)
    throw ConfigurationError("initial level outside [0, capacity]");
  if (const auto* f = std::get_if<StochasticFlow>(&flow)) {
    if (f->std_dev < 0.0) throw ConfigurationError("stdDev must be non-negative");
    if (!(0.0 <= f->leak_min && f->leak_min <= f->leak_max))
      throw ConfigurationError("leakage bounds must satisfy 0 <= leakMin <= leakMax");
  } else if (std::get<DeterministicFlow>(flow).rate < 0.0) {
    throw ConfigurationError("rate must be non-negative");
  }
}

PlantConfig PlantConfig::deterministic() { return PlantConfig{}; }

PlantConfig PlantConfig::noisy(std::uint64_t seed) {
  PlantConfig cfg;
  cfg.flow = StochasticFlow{};
  cfg.seed = seed;
  return cfg;
}

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ParseError("plant config: '" + key + "' is not a number: '" + v + "'");
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

PlantConfig read_plant_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("plant config line " + std::to_string(lineno) + ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  PlantConfig cfg;
  std::string model = "Deterministic";
  for (const auto& [key, value] : kv) {
    if (key == "capacity") cfg.capacity = to_double(key, value);
    else if (key == "sensorLevels.ULS") cfg.sensor_levels.uls = to_double(key, value);
    else if (key == "sensorLevels.MLS") cfg.sensor_levels.mls = to_double(key, value);
    else if (key == "sensorLevels.LLS") cfg.sensor_levels.lls = to_double(key, value);
    else if (key == "dt") cfg.dt = to_double(key, value);
    else if (key == "initialLevel") cfg.initial_level = to_double(key, value);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "flowModel") model = value;
    else if (!key.starts_with("flowModel."))
      throw ParseError("plant config: unknown key '" + key + "'");
  }
  auto num = [&](const char* key, double fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : to_double(key, it->second);
  };
  if (model == "Deterministic") {
    cfg.flow = DeterministicFlow{num("flowModel.rate", 9.0)};
  } else if (model == "Stochastic") {
    cfg.flow = StochasticFlow{num("flowModel.meanRate", 9.0), num("flowModel.stdDev", 2.0),
                              num("flowModel.leakMin", 0.0), num("flowModel.leakMax", 0.5)};
  } else {
    throw ParseError("plant config: flowModel must be Deterministic or Stochastic");
  }
  cfg.validate();
  return cfg;
}

PlantConfig read_plant_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  return read_plant_config(in);
}

void write_plant_config(const PlantConfig& cfg, std::ostream& out) {
  out << "capacity = " << fmt(cfg.capacity) << '\n'
      << "sensorLevels.ULS = " << fmt(cfg.sensor_levels.uls) << '\n'
      << "sensorLevels.MLS = " << fmt(cfg.sensor_levels.mls) << '\n'
      << "sensorLevels.LLS = " << fmt(cfg.sensor_levels.lls) << '\n';
  if (const auto* f = std::get_if<StochasticFlow>(&cfg.flow)) {
    out << "flowModel = Stochastic\n"
        << "flowModel.meanRate = " << fmt(f->mean_rate) << '\n'
        << "flowModel.stdDev = " << fmt(f->std_dev) << '\n'
        << "flowModel.leakMin = " << fmt(f->leak_min) << '\n'
        << "flowModel.leakMax = " << fmt(f->leak_max) << '\n';
  } else {
    out << "flowModel = Deterministic\n"
        << "flowModel.rate = " << fmt(std::get<DeterministicFlow>(cfg.flow).rate) << '\n';
  }
  out << "dt = " << fmt(cfg.dt) << '\n'
      << "seed = " << cfg.seed << '\n'
      << "initialLevel = " << fmt(cfg.initial_level) << '\n';
}

SensorReading read_sensors(double level, const PlantConfig& cfg) {
  const auto& s = cfg.sensor_levels;
  return {level >= s.uls, level >= s.mls, level >= s.lls};
}

PlantState initial_state(const PlantConfig& cfg) {
  PlantState s;
  s.level = cfg.initial_level;
  s.sensors = read_sensors(s.level, cfg);
  return s;
}

PlantState step(const PlantState& state, const PlantConfig& cfg, bool inv, bool outv, Rng& rng) {
  double in_flow = 0.0;
  double out_flow = 0.0;
  if (const auto* f = std::get_if<StochasticFlow>(&cfg.flow)) {
    auto draw = [&](bool open) {
      return open ? std::max(0.0, rng.normal(f->mean_rate, f->std_dev))
                  : rng.uniform(f->leak_min, f->leak_max);
    };
    in_flow = draw(inv);
    out_flow = draw(outv);
  } else {
    const double rate = std::get<DeterministicFlow>(cfg.flow).rate;
    in_flow = inv ? rate : 0.0;
    out_flow = outv ? rate : 0.0;
  }
  PlantState next;
  next.level = std::clamp(state.level + (in_flow - out_flow) * cfg.dt, 0.0, cfg.capacity);
  next.tick = state.tick + 1;
  next.sensors = read_sensors(next.level, cfg);
  next.actuators = {inv, outv};
  return next;
}

TankPlant::TankPlant(PlantConfig cfg)
    : cfg_(std::move(cfg)), rng_(cfg_.seed), state_(initial_state(cfg_)) {
  cfg_.validate();
}

void write_trajectory(const Trajectory& traj, std::ostream& out) {
  out << "tick,time_s,level,ULS,MLS,LLS,inv,outv\n";
  for (const auto& p : traj)
    out << p.tick << ',' << fmt(p.time_s) << ',' << fmt(p.level) << ',' << p.sensors.uls << ','
        << p.sensors.mls << ',' << p.sensors.lls << ',' << p.actuators.inv << ','
        << p.actuators.outv << '\n';
}

void write_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_trajectory(traj, out);
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "tick,time_s,level,ULS,MLS,LLS,inv,outv")
    throw ParseError("trajectory line 1: unexpected header");
  Trajectory traj;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 8) throw ParseError("trajectory line " + std::to_string(lineno) + ": 8 fields expected");
    TrajectoryPoint p;
    p.tick = std::stoll(f[0]);
    p.time_s = to_double("time_s", f[1]);
    p.level = to_double("level", f[2]);
    p.sensors = {f[3] == "1", f[4] == "1", f[5] == "1"};
    p.actuators = {f[6] == "1", f[7] == "1"};
    traj.push_back(p);
  }
  return traj;
}

}  // namespace plcmine
