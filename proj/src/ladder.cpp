#include "plcmine/ladder.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "plcmine/errors.hpp"

namespace plcmine {

Expr Expr::constant(bool v) {
  Expr e;
  e.kind = Kind::Const;
  e.value = v;
  return e;
}

Expr Expr::var(std::string name) {
  Expr e;
  e.kind = Kind::Var;
  e.name = std::move(name);
  return e;
}

Expr Expr::done(std::string counter) {
  Expr e;
  e.kind = Kind::Done;
  e.name = std::move(counter);
  return e;
}

Expr operator!(Expr e) {
  Expr out;
  out.kind = Expr::Kind::Not;
  out.args.push_back(std::move(e));
  return out;
}

namespace {

Expr combine(Expr::Kind kind, Expr a, Expr b) {
  Expr out;
  out.kind = kind;
  for (Expr* e : {&a, &b}) {
    if (e->kind == kind)
      for (auto& x : e->args) out.args.push_back(std::move(x));
    else
      out.args.push_back(std::move(*e));
  }
  return out;
}

void collect_names(const Expr& e, std::vector<std::pair<Expr::Kind, std::string>>& out) {
  if (e.kind == Expr::Kind::Var || e.kind == Expr::Kind::Done) out.emplace_back(e.kind, e.name);
  for (const auto& a : e.args) collect_names(a, out);
}

}  // namespace

Expr operator&&(Expr a, Expr b) { return combine(Expr::Kind::And, std::move(a), std::move(b)); }
Expr operator||(Expr a, Expr b) { return combine(Expr::Kind::Or, std::move(a), std::move(b)); }

void LadderProgram::validate() const {
  std::set<std::string> vars = internals;
  for (const auto& [addr, v] : inputs) {
    if (class_of_address(addr) != SignalClass::Input)
      throw WiringError("input " + v + " mapped to non-input address " + addr);
    vars.insert(v);
  }
  for (const auto& [addr, v] : outputs) {
    if (class_of_address(addr) != SignalClass::Output)
      throw WiringError("output " + v + " mapped to non-output address " + addr);
    vars.insert(v);
  }
  std::set<std::string> counter_names;
  for (const auto& c : counters) {
    if (c.preset < 0) throw WiringError("counter " + c.name + " has a negative preset");
    counter_names.insert(c.name);
  }

  auto check = [&](const Expr& e, const std::string& where) {
    std::vector<std::pair<Expr::Kind, std::string>> names;
    collect_names(e, names);
    for (const auto& [kind, n] : names) {
      const bool ok = kind == Expr::Kind::Var ? vars.contains(n) : counter_names.contains(n);
      if (!ok) throw WiringError(where + " references undeclared '" + n + "'");
    }
  };
  for (const auto& c : counters) {
    check(c.count_input, "counter " + c.name);
    check(c.reset_input, "counter " + c.name);
  }
  std::set<std::string> input_vars;
  for (const auto& [addr, v] : inputs) input_vars.insert(v);
  for (const auto& r : rungs) {
    if (r.kind == Rung::Kind::Counter) {
      if (!counter_names.contains(r.target))
        throw WiringError("rung references undeclared counter '" + r.target + "'");
      continue;
    }
    if (!vars.contains(r.target) || input_vars.contains(r.target))
      throw WiringError("coil '" + r.target + "' is not an output or internal variable");
    check(r.expr, "rung " + r.target);
  }
}

LadderProgram make_c1() {
  LadderProgram p;
  p.name = "C1";
  p.inputs = {{std::string(wiring::kUls), "ul"}, {std::string(wiring::kLls), "ll"}};
  p.outputs = {{std::string(wiring::kInv), "inv"}, {std::string(wiring::kOutv), "outv"}};
  p.internals = {"ctrl"};
  const auto ul = Expr::var("ul"), ll = Expr::var("ll"), ctrl = Expr::var("ctrl");
  p.rungs = {Rung::coil("ctrl", !ul && (ctrl || !ll)),
             Rung::coil("inv", ctrl),
             Rung::coil("outv", !ctrl)};
  p.validate();
  return p;
}

LadderProgram make_c2(int preset) {
  LadderProgram p;
  p.name = "C2";
  p.inputs = {{std::string(wiring::kUls), "ul"},
              {std::string(wiring::kLls), "ll"},
              {std::string(wiring::kMls), "ml"}};
  p.outputs = {{std::string(wiring::kInv), "inv"}, {std::string(wiring::kOutv), "outv"}};
  p.internals = {"ctrl", "pass"};
  const auto ul = Expr::var("ul"), ll = Expr::var("ll"), ml = Expr::var("ml");
  const auto ctrl = Expr::var("ctrl"), pass = Expr::var("pass");
  p.counters = {CounterBlock{"cnt", preset, ul, !ll}};
  p.rungs = {Rung::counter("cnt"),
             Rung::coil("pass", (Expr::done("cnt") || pass) && ll),
             Rung::coil("ctrl", !ul && (ctrl || !ll || (!ml && !pass))),
             Rung::coil("inv", ctrl),
             Rung::coil("outv", !ctrl)};
  p.validate();
  return p;
}

namespace {

using nlohmann::json;

Expr expr_from_json(const json& j) {
  if (j.is_boolean()) return Expr::constant(j.get<bool>());
  if (j.is_string()) return Expr::var(j.get<std::string>());
  if (!j.is_object() || j.size() != 1) throw ParseError("ladder: malformed expression " + j.dump());
  const auto& [key, value] = *j.items().begin();
  if (key == "not") return !expr_from_json(value);
  if (key == "done") return Expr::done(value.get<std::string>());
  if (key == "and" || key == "or") {
    if (!value.is_array() || value.empty()) throw ParseError("ladder: '" + key + "' needs operands");
    Expr out;
    out.kind = key == "and" ? Expr::Kind::And : Expr::Kind::Or;
    for (const auto& a : value) out.args.push_back(expr_from_json(a));
    return out;
  }
  throw ParseError("ladder: unknown operator '" + key + "'");
}

}  // namespace

LadderProgram ladder_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("ladder: ") + e.what());
  }
  try {
    LadderProgram p;
    p.name = doc.value("name", "custom");
    p.inputs = doc.at("inputs").get<std::map<std::string, std::string>>();
    p.outputs = doc.at("outputs").get<std::map<std::string, std::string>>();
    for (const auto& v : doc.value("internals", json::array())) p.internals.insert(v.get<std::string>());
    for (const auto& c : doc.value("counters", json::array()))
      p.counters.push_back({c.at("name").get<std::string>(), c.at("preset").get<int>(),
                            expr_from_json(c.at("count")), expr_from_json(c.at("reset"))});
    for (const auto& r : doc.at("rungs")) {
      if (r.contains("counter"))
        p.rungs.push_back(Rung::counter(r.at("counter").get<std::string>()));
      else
        p.rungs.push_back(Rung::coil(r.at("coil").get<std::string>(), expr_from_json(r.at("expr"))));
    }
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw ParseError(std::string("ladder: ") + e.what());
  }
}

LadderProgram read_ladder(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ladder_from_json(ss.str());
}

LadderRuntime::LadderRuntime(LadderProgram program) : program_(std::move(program)) {
  program_.validate();
  for (const auto& [addr, v] : program_.inputs) vars_[v] = false;
  for (const auto& [addr, v] : program_.outputs) vars_[v] = false;
  for (const auto& v : program_.internals) vars_[v] = false;
  for (const auto& c : program_.counters) {
    counters_[c.name] = CounterState{};
    counters_[c.name].done = c.preset == 0;
    blocks_[c.name] = &c;
  }
}

bool LadderRuntime::eval(const Expr& e) const {
  switch (e.kind) {
    case Expr::Kind::Const: return e.value;
    case Expr::Kind::Var: return vars_.find(e.name)->second;
    case Expr::Kind::Done: return counters_.find(e.name)->second.done;
    case Expr::Kind::Not: return !eval(e.args.front());
    case Expr::Kind::And:
      for (const auto& a : e.args)
        if (!eval(a)) return false;
      return true;
    case Expr::Kind::Or:
      for (const auto& a : e.args)
        if (eval(a)) return true;
      return false;
  }
  return false;
}

std::map<std::string, bool> LadderRuntime::scan(const std::map<std::string, bool>& inputs) {
  for (const auto& [addr, v] : program_.inputs) {
    const auto it = inputs.find(addr);
    if (it == inputs.end()) throw WiringError("no value for input address " + addr);
    vars_[v] = it->second;
  }
  for (const auto& rung : program_.rungs) {
    if (rung.kind == Rung::Kind::Coil) {
      vars_[rung.target] = eval(rung.expr);
      continue;
    }
    const CounterBlock& block = *blocks_.find(rung.target)->second;
    auto& st = counters_.find(rung.target)->second;
    const bool cu = eval(block.count_input);
    if (eval(block.reset_input))
      st.count = 0;
    else if (cu && !st.previous_input && st.count < block.preset)
      ++st.count;
    st.previous_input = cu;
    st.done = st.count >= block.preset;
  }
  std::map<std::string, bool> out;
  for (const auto& [addr, v] : program_.outputs) out[addr] = vars_[v];
  return out;
}

bool LadderRuntime::variable(std::string_view name) const {
  const auto it = vars_.find(name);
  if (it == vars_.end()) throw WiringError("unknown variable '" + std::string(name) + "'");
  return it->second;
}

const CounterState& LadderRuntime::counter(std::string_view name) const {
  const auto it = counters_.find(name);
  if (it == counters_.end()) throw WiringError("unknown counter '" + std::string(name) + "'");
  return it->second;
}

namespace wiring {

bool sensor_value(std::string_view address, const SensorReading& s) {
  if (address == kUls) return s.uls;
  if (address == kLls) return s.lls;
  if (address == kMls) return s.mls;
  throw WiringError("address " + std::string(address) + " is not wired to a tank sensor");
}

std::map<std::string, bool> input_image(const std::set<std::string>& addresses,
                                        const SensorReading& s) {
  std::map<std::string, bool> out;
  for (const auto& a : addresses) out[a] = sensor_value(a, s);
  return out;
}

}  // namespace wiring

Tick ticks_for(double duration_s, double dt) {
  if (duration_s <= 0.0) return 0;
  // Guard against 880 / 0.1 landing a hair below 8800.
  return static_cast<Tick>(std::floor(duration_s / dt + 1e-9));
}

ClosedLoopRun run_closed_loop(const LadderProgram& program, const PlantConfig& plant_cfg,
                              double duration_s) {
  LadderRuntime runtime(program);
  TankPlant plant(plant_cfg);
  // The tap sees every wired sensor, whether or not the program reads it.
  std::set<std::string> in_addrs{std::string(wiring::kUls), std::string(wiring::kLls),
                                 std::string(wiring::kMls)};
  for (const auto& [addr, v] : program.inputs)
    if (!in_addrs.count(addr)) throw WiringError("input " + addr + " is not wired to a tank sensor");
  for (const auto& [addr, v] : program.outputs)
    if (addr != wiring::kInv && addr != wiring::kOutv)
      throw WiringError("output " + addr + " is not wired to a tank actuator");

  ClosedLoopRun run;
  const Tick n = ticks_for(duration_s, plant_cfg.dt);
  run.trajectory.reserve(static_cast<std::size_t>(n));
  for (Tick k = 0; k < n; ++k) {
    const PlantState& s = plant.state();
    const auto inputs = wiring::input_image(in_addrs, s.sensors);
    for (const auto& [addr, v] : inputs) run.io_log.push_back({k, addr, v, SignalClass::Input});
    const auto outputs = runtime.scan(inputs);
    for (const auto& [addr, v] : outputs) run.io_log.push_back({k, addr, v, SignalClass::Output});

    const auto inv_it = outputs.find(std::string(wiring::kInv));
    const auto outv_it = outputs.find(std::string(wiring::kOutv));
    const Actuators act{inv_it != outputs.end() && inv_it->second,
                        outv_it != outputs.end() && outv_it->second};
    run.trajectory.push_back({k, static_cast<double>(k) * plant_cfg.dt, s.level, s.sensors, act});
    plant.step(act.inv, act.outv);
  }
  return run;
}

}  // namespace plcmine
