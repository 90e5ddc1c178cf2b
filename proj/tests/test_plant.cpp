#include <doctest.h>

#include <cmath>
#include <sstream>

#include "plcmine/errors.hpp"
#include "plcmine/plant.hpp"

using namespace plcmine;

namespace {

PlantState at_level(double level) {
  PlantState s;
  s.level = level;
  return s;
}

}  // namespace

TEST_CASE("deterministic plant moves 9 gal/s through an open valve") {
  auto cfg = PlantConfig::deterministic();
  cfg.dt = 1.0;
  Rng rng(0);
  CHECK(step(at_level(50), cfg, true, false, rng).level == doctest::Approx(59));
  CHECK(step(at_level(50), cfg, false, false, rng).level == doctest::Approx(50));
  CHECK(step(at_level(50), cfg, false, true, rng).level == doctest::Approx(41));
  CHECK(step(at_level(50), cfg, true, true, rng).level == doctest::Approx(50));
}

TEST_CASE("level stays inside the tank") {
  auto cfg = PlantConfig::deterministic();
  cfg.dt = 1.0;
  Rng rng(0);
  CHECK(step(at_level(95), cfg, true, false, rng).level == doctest::Approx(100));
  CHECK(step(at_level(3), cfg, false, true, rng).level == doctest::Approx(0));

  auto noisy = PlantConfig::noisy(7);
  Rng fuzz(99);
  TankPlant plant(noisy);
  for (int i = 0; i < 20000; ++i) {
    plant.step(fuzz.uniform01() < 0.5, fuzz.uniform01() < 0.5);
    REQUIRE(plant.state().level >= 0.0);
    REQUIRE(plant.state().level <= noisy.capacity);
  }
}

TEST_CASE("sensor thresholds are inclusive") {
  const auto cfg = PlantConfig::deterministic();
  CHECK(read_sensors(90, cfg) == SensorReading{true, true, true});
  CHECK(read_sensors(50, cfg) == SensorReading{false, true, true});
  CHECK(read_sensors(5, cfg) == SensorReading{false, false, false});
  CHECK(read_sensors(10, cfg) == SensorReading{false, false, true});
}

TEST_CASE("sensors switch on in LLS, MLS, ULS order while filling") {
  TankPlant plant(PlantConfig::deterministic());
  int prev_count = 0;
  for (int i = 0; i < 120; ++i) {
    plant.step(true, false);
    const auto s = plant.state().sensors;
    CHECK((!s.uls || s.mls));
    CHECK((!s.mls || s.lls));
    const int count = s.uls + s.mls + s.lls;
    CHECK(count >= prev_count);
    prev_count = count;
  }
}

TEST_CASE("filling from empty reaches ULS after about 10 s") {
  TankPlant plant(PlantConfig::deterministic());
  int ticks = 0;
  while (!plant.state().sensors.uls && ticks < 1000) {
    plant.step(true, false);
    ++ticks;
  }
  CHECK(ticks >= 99);
  CHECK(ticks <= 101);
}

TEST_CASE("closed valves leak at most 0.5 gal/s each") {
  auto cfg = PlantConfig::noisy(42);
  cfg.initial_level = 50;
  TankPlant plant(cfg);
  for (int i = 0; i < 100; ++i) plant.step(false, false);
  // Inlet leaks in, outlet leaks out: the net change is bounded by 100 x 0.1 x 0.5 either way.
  const double change = plant.state().level - 50;
  CHECK(std::abs(change) <= 5.0);
  CHECK(change != 0.0);

  auto only_out = cfg;
  only_out.initial_level = 50;
  TankPlant draining(only_out);
  for (int i = 0; i < 100; ++i) draining.step(true, false);
  CHECK(draining.state().level > 50);
}

TEST_CASE("plant runs are reproducible from the seed") {
  auto run = [](std::uint64_t seed) {
    TankPlant plant(PlantConfig::noisy(seed));
    std::vector<double> levels;
    for (int i = 0; i < 500; ++i) {
      plant.step(i % 200 < 100, i % 200 >= 100);
      levels.push_back(plant.state().level);
    }
    return levels;
  };
  CHECK(run(5) == run(5));
  CHECK(run(5) != run(6));
}

TEST_CASE("plant configuration validation and file round-trip") {
  auto cfg = PlantConfig::noisy(3);
  std::stringstream buf;
  write_plant_config(cfg, buf);
  const auto back = read_plant_config(buf);
  CHECK(back.capacity == cfg.capacity);
  CHECK(back.seed == cfg.seed);
  CHECK(back.stochastic());
  CHECK(std::get<StochasticFlow>(back.flow).std_dev == doctest::Approx(2.0));

  auto bad = PlantConfig::deterministic();
  bad.sensor_levels.mls = 95;
  CHECK_THROWS_AS(bad.validate(), ConfigurationError);
  bad = PlantConfig::deterministic();
  bad.dt = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigurationError);

  std::stringstream unknown("capacity = 100\nbogus = 1\n");
  CHECK_THROWS(read_plant_config(unknown));
}
