#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "plcmine/event_log.hpp"
#include "plcmine/rng.hpp"

namespace plcmine {

struct SensorLevels {
  double uls = 90.0;
  double mls = 50.0;
  double lls = 10.0;
};

struct DeterministicFlow {
  double rate = 9.0;
};

struct StochasticFlow {
  double mean_rate = 9.0;
  double std_dev = 2.0;
  double leak_min = 0.0;
  double leak_max = 0.5;
};

using FlowModel = std::variant<DeterministicFlow, StochasticFlow>;

struct PlantConfig {
  double capacity = 100.0;
  SensorLevels sensor_levels;
  FlowModel flow = DeterministicFlow{};
  double dt = 0.1;
  std::uint64_t seed = 0;
  double initial_level = 0.0;

  /// Throws ConfigurationError when an invariant is violated.
  void validate() const;
  bool stochastic() const { return std::holds_alternative<StochasticFlow>(flow); }

  /// P1: constant 9 gal/s through an open valve, nothing through a closed one.
  static PlantConfig deterministic();
  /// P2: Normal(9, 2) through an open valve, Uniform(0, 0.5) leakage when closed.
  static PlantConfig noisy(std::uint64_t seed);
};

/// Key-value file, one `key = value` per line, `#` comments. Keys: capacity,
/// sensorLevels.ULS, sensorLevels.MLS, sensorLevels.LLS, flowModel
/// (Deterministic|Stochastic), flowModel.rate, flowModel.meanRate,
/// flowModel.stdDev, flowModel.leakMin, flowModel.leakMax, dt, seed,
/// initialLevel.
PlantConfig read_plant_config(std::istream& in);
PlantConfig read_plant_config(const std::filesystem::path& path);
void write_plant_config(const PlantConfig& cfg, std::ostream& out);

struct SensorReading {
  bool uls = false;
  bool mls = false;
  bool lls = false;
  friend bool operator==(const SensorReading&, const SensorReading&) = default;
};

struct Actuators {
  bool inv = false;
  bool outv = false;
  friend bool operator==(const Actuators&, const Actuators&) = default;
};

struct PlantState {
  double level = 0.0;
  Tick tick = 0;
  SensorReading sensors;
  Actuators actuators;
  friend bool operator==(const PlantState&, const PlantState&) = default;
};

/// Each sensor reads true iff the level is at or above its threshold.
SensorReading read_sensors(double level, const PlantConfig& cfg);
inline SensorReading read_sensors(const PlantState& s, const PlantConfig& cfg) {
  return read_sensors(s.level, cfg);
}

PlantState initial_state(const PlantConfig& cfg);

/// Advances one tick with the given valve commands. The stochastic model
/// draws the inlet flow, then the outlet flow, from `rng`; the deterministic
/// model never touches it.
PlantState step(const PlantState& state, const PlantConfig& cfg, bool inv, bool outv, Rng& rng);

/// Plant plus its private random stream.
class TankPlant {
 public:
  explicit TankPlant(PlantConfig cfg);
  const PlantState& state() const { return state_; }
  const PlantConfig& config() const { return cfg_; }
  void step(bool inv, bool outv) { state_ = plcmine::step(state_, cfg_, inv, outv, rng_); }

 private:
  PlantConfig cfg_;
  Rng rng_;
  PlantState state_;
};

/// One row per tick: the state seen by the controller and the valve commands
/// it applied during that tick.
struct TrajectoryPoint {
  Tick tick = 0;
  double time_s = 0.0;
  double level = 0.0;
  SensorReading sensors;
  Actuators actuators;
  friend bool operator==(const TrajectoryPoint&, const TrajectoryPoint&) = default;
};

using Trajectory = std::vector<TrajectoryPoint>;

/// CSV `tick,time_s,level,ULS,MLS,LLS,inv,outv` with 0/1 booleans.
void write_trajectory(const Trajectory& traj, std::ostream& out);
void write_trajectory(const Trajectory& traj, const std::filesystem::path& path);
Trajectory read_trajectory(const std::filesystem::path& path);

}  // namespace plcmine
