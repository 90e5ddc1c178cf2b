#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "plcmine/event_log.hpp"
#include "plcmine/plant.hpp"

namespace plcmine {

/// Boolean rung expression over program variables and counter done flags.
struct Expr {
  enum class Kind { Const, Var, Done, Not, And, Or };

  Kind kind = Kind::Const;
  bool value = false;      // Const
  std::string name;        // Var, Done
  std::vector<Expr> args;  // Not (one), And, Or

  static Expr constant(bool v);
  static Expr var(std::string name);
  static Expr done(std::string counter);
};

Expr operator!(Expr e);
Expr operator&&(Expr a, Expr b);
Expr operator||(Expr a, Expr b);

/// IEC-style up-counter: counts rising edges of `count_input`, saturating at
/// `preset`; `reset_input` forces the count back to 0.
struct CounterBlock {
  std::string name;
  int preset = 0;
  Expr count_input;
  Expr reset_input;
};

struct Rung {
  enum class Kind { Coil, Counter };
  Kind kind = Kind::Coil;
  std::string target;  // coil variable, or counter name
  Expr expr;           // unused for counter rungs

  static Rung coil(std::string target, Expr e) { return {Kind::Coil, std::move(target), std::move(e)}; }
  static Rung counter(std::string name) { return {Kind::Counter, std::move(name), {}}; }
};

struct LadderProgram {
  std::string name;
  std::map<std::string, std::string> inputs;   // address -> variable
  std::map<std::string, std::string> outputs;  // address -> variable
  std::set<std::string> internals;
  std::vector<CounterBlock> counters;
  std::vector<Rung> rungs;

  /// Checks that every referenced name is declared and addresses carry the
  /// right %I/%Q prefix. Throws WiringError otherwise.
  void validate() const;
};

/// Seal-in latch: ctrl = !ul && (ctrl || !ll); inv = ctrl; outv = !ctrl.
LadderProgram make_c1();
/// Latch plus counter: fills to ULS, cycles ULS<->MLS until the ULS counter
/// reaches `preset`, then drains below LLS (where counter and pass reset).
LadderProgram make_c2(int preset = 3);

LadderProgram ladder_from_json(std::string_view text);
LadderProgram read_ladder(const std::filesystem::path& path);

struct CounterState {
  int count = 0;
  bool done = false;
  bool previous_input = false;
};

/// Executes a program with PLC scan semantics. Variable and counter state
/// persists between scans.
class LadderRuntime {
 public:
  explicit LadderRuntime(LadderProgram program);

  /// Latches the input image, evaluates rungs top to bottom (assignments are
  /// visible to later rungs) and returns the output image by address.
  /// Throws WiringError if a declared input address is missing.
  std::map<std::string, bool> scan(const std::map<std::string, bool>& inputs);

  const LadderProgram& program() const { return program_; }
  bool variable(std::string_view name) const;
  const CounterState& counter(std::string_view name) const;

 private:
  bool eval(const Expr& e) const;

  LadderProgram program_;
  std::map<std::string, bool, std::less<>> vars_;
  std::map<std::string, CounterState, std::less<>> counters_;
  std::map<std::string, const CounterBlock*, std::less<>> blocks_;
};

/// Physical wiring of the tank: ULS -> %IX0.0, LLS -> %IX0.1, MLS -> %IX0.2,
/// %QX0.0 -> inv, %QX0.1 -> outv.
namespace wiring {
inline constexpr std::string_view kUls = "%IX0.0";
inline constexpr std::string_view kLls = "%IX0.1";
inline constexpr std::string_view kMls = "%IX0.2";
inline constexpr std::string_view kInv = "%QX0.0";
inline constexpr std::string_view kOutv = "%QX0.1";

bool sensor_value(std::string_view address, const SensorReading& s);
std::map<std::string, bool> input_image(const std::set<std::string>& addresses,
                                        const SensorReading& s);
}  // namespace wiring

struct ClosedLoopRun {
  Trajectory trajectory;
  std::vector<IOSample> io_log;
};

/// Number of whole ticks in `duration_s` (truncated at the tick boundary).
Tick ticks_for(double duration_s, double dt);

/// True controller in the loop: per tick read sensors, record %I samples,
/// scan, record %Q samples, apply the outputs and step the plant.
ClosedLoopRun run_closed_loop(const LadderProgram& program, const PlantConfig& plant,
                              double duration_s);

}  // namespace plcmine
