#include "platoon/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "platoon/errors.hpp"

namespace platoon {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Typed access to one JSON object that remembers which keys were consumed,
// so typos surface as "unknown field" instead of silently using a default.
class Fields {
 public:
  Fields(const json& j, std::string path, const std::string& origin)
      : j_(j), path_(std::move(path)), origin_(origin) {
    if (!j_.is_object()) throw error("", "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw error(key, "expected a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw error(key, "expected an integer");
    return v.get<int>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw error(key, "expected a string");
    return v.get<std::string>();
  }

  std::string child(const std::string& key) const { return path_ + "/" + key; }

  ConfigError error(const std::string& key, const std::string& what) const {
    const std::string where = key.empty() ? (path_.empty() ? "/" : path_) : child(key);
    return ConfigError(origin_ + ": field '" + where + "': " + what);
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw error(item.key(), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  const std::string& origin_;
  std::set<std::string> seen_;
};

// Re-throws library ConfigErrors raised while validating a sub-object with
// the sub-object's path attached.
template <class Fn>
auto at_field(const Fields& f, const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    if (std::string(e.what()).find(": field '") != std::string::npos) throw;
    throw f.error(key, e.what());
  }
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  fs::path p(path);
  if (p.is_relative()) p = fs::path(base_dir) / p;
  return fs::absolute(p).lexically_normal().string();
}

PlatoonConfig defaults_for(PlatoonKind kind, int r) {
  switch (kind) {
    case PlatoonKind::CS: return PlatoonConfig::cs_platoon(5);
    case PlatoonKind::CTG: return PlatoonConfig::ctg_platoon(5, r);
    case PlatoonKind::Hybrid: return PlatoonConfig::hybrid(5);
  }
  return PlatoonConfig::hybrid(5);
}

PlatoonConfig parse_platoon(const json& j, const std::string& path, const std::string& origin,
                            bool require_n = true) {
  Fields f(j, path, origin);
  const PlatoonKind kind =
      at_field(f, "system", [&] { return platoon_kind_from_string(f.text("system", "HYBRID")); });
  const int r = f.integer("r", 2);
  PlatoonConfig c = defaults_for(kind, r);
  c.r = r;
  c.n = f.integer("n", require_n ? c.n : 2);
  c.exogenous_leader = at_field(f, "exogenous_leader", [&] {
    return leader_kind_from_string(f.text("exogenous_leader", to_string(c.exogenous_leader)));
  });
  if (f.has("vehicle")) {
    Fields v(f.raw("vehicle"), f.child("vehicle"), origin);
    c.vehicle.phi = v.number("phi", c.vehicle.phi);
    c.vehicle.length = v.number("length", c.vehicle.length);
    c.vehicle.standstill = v.number("standstill", c.vehicle.standstill);
    c.vehicle.sensor_delay = v.number("sensor_delay", c.vehicle.sensor_delay);
    c.vehicle.comm_delay = v.number("comm_delay", c.vehicle.comm_delay);
    c.vehicle.leader_delay_per_hop = v.number("leader_delay_per_hop", c.vehicle.leader_delay_per_hop);
    v.finish();
    at_field(f, "vehicle", [&] { c.vehicle.validate(); return 0; });
  }
  if (f.has("ctg")) {
    Fields g(f.raw("ctg"), f.child("ctg"), origin);
    c.ctg.k_s = g.number("k_s", c.ctg.k_s);
    c.ctg.k_v = g.number("k_v", c.ctg.k_v);
    c.ctg.k_a = g.number("k_a", c.ctg.k_a);
    c.ctg.h = g.number("h", c.ctg.h);
    g.finish();
  }
  c.h_follower = f.number("h_follower", c.h_follower);
  if (f.has("cs")) {
    Fields g(f.raw("cs"), f.child("cs"), origin);
    c.cs.q1 = g.number("q1", c.cs.q1);
    c.cs.q3 = g.number("q3", c.cs.q3);
    c.cs.q4 = g.number("q4", c.cs.q4);
    c.cs.lambda = g.number("lambda", c.cs.lambda);
    g.finish();
  }
  f.finish();
  c = c.effective();
  if (require_n) at_field(f, "", [&] { c.validate(); return 0; });
  return c;
}

json emit_platoon(const PlatoonConfig& c, bool with_n = true) {
  json j;
  j["system"] = to_string(c.kind);
  if (with_n) j["n"] = c.n;
  j["r"] = c.r;
  j["exogenous_leader"] = to_string(c.exogenous_leader);
  j["vehicle"] = {{"phi", c.vehicle.phi},
                  {"length", c.vehicle.length},
                  {"standstill", c.vehicle.standstill},
                  {"sensor_delay", c.vehicle.sensor_delay},
                  {"comm_delay", c.vehicle.comm_delay},
                  {"leader_delay_per_hop", c.vehicle.leader_delay_per_hop}};
  j["ctg"] = {{"k_s", c.ctg.k_s}, {"k_v", c.ctg.k_v}, {"k_a", c.ctg.k_a}, {"h", c.ctg.h}};
  j["h_follower"] = c.h_follower;
  j["cs"] = {{"q1", c.cs.q1}, {"q3", c.cs.q3}, {"q4", c.cs.q4}, {"lambda", c.cs.lambda}};
  return j;
}

Scenario parse_scenario(const json& j, const std::string& path, const std::string& origin,
                        const std::string& base_dir) {
  Fields f(j, path, origin);
  const ScenarioKind kind = at_field(
      f, "kind", [&] { return scenario_kind_from_string(f.text("kind", "decel-accel")); });
  Scenario s = kind == ScenarioKind::Periodic ? Scenario::periodic() : Scenario::decel_accel();
  s.kind = kind;
  s.duration = f.number("duration", s.duration);
  s.v0 = f.number("v0", s.v0);
  s.amplitude = f.number("amplitude", s.amplitude);
  s.period = f.number("period", s.period);
  s.active = f.number("active", s.active);
  s.cruise_time = f.number("cruise_time", s.cruise_time);
  s.low_speed = f.number("low_speed", s.low_speed);
  s.deceleration = f.number("deceleration", s.deceleration);
  s.hold_time = f.number("hold_time", s.hold_time);
  s.acceleration = f.number("acceleration", s.acceleration);
  if (f.has("profile")) {
    const std::string p = resolve(f.text("profile", ""), base_dir);
    s.samples = at_field(f, "profile", [&] { return load_profile_csv(p); });
  }
  if (f.has("samples")) {
    const json& arr = f.raw("samples");
    if (!arr.is_array()) throw f.error("samples", "expected an array of [t, a] pairs");
    s.samples.clear();
    for (const auto& pt : arr) {
      if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
        throw f.error("samples", "expected an array of [t, a] pairs");
      }
      s.samples.emplace_back(pt[0].get<double>(), pt[1].get<double>());
    }
  }
  f.finish();
  at_field(f, "", [&] { s.validate(); return 0; });
  return s;
}

json emit_scenario(const Scenario& s) {
  json j;
  j["kind"] = to_string(s.kind);
  j["duration"] = s.duration;
  j["v0"] = s.v0;
  j["amplitude"] = s.amplitude;
  j["period"] = s.period;
  j["active"] = s.active;
  j["cruise_time"] = s.cruise_time;
  j["low_speed"] = s.low_speed;
  j["deceleration"] = s.deceleration;
  j["hold_time"] = s.hold_time;
  j["acceleration"] = s.acceleration;
  if (!s.samples.empty()) {
    json arr = json::array();
    for (const auto& [t, a] : s.samples) arr.push_back({t, a});
    j["samples"] = arr;
  }
  return j;
}

ScanAxis parse_axis(const json& j, const std::string& path, const std::string& origin) {
  Fields f(j, path, origin);
  ScanAxis a;
  a.name = f.text("name", "");
  a.min = f.number("min", 0.0);
  a.max = f.number("max", 0.0);
  a.resolution = f.integer("resolution", 2);
  f.finish();
  at_field(f, "", [&] {
    StabilityParams probe;
    get_stability_param(probe, a.name);
    a.values();
    return 0;
  });
  return a;
}

json emit_axis(const ScanAxis& a) {
  return {{"name", a.name}, {"min", a.min}, {"max", a.max}, {"resolution", a.resolution}};
}

const char* reference_name(OutflowReference r) {
  return r == OutflowReference::Exogenous ? "exogenous" : "first-member";
}

}  // namespace

ExperimentSpec parse_experiment(const std::string& text, const std::string& origin,
                                const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t k = 0; k < upto; ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    if (const auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }

  ExperimentSpec spec;
  Fields f(j, "", origin);

  static const char* kPlatoonKeys[] = {"system", "n", "r", "exogenous_leader", "vehicle",
                                       "ctg", "h_follower", "cs"};
  bool single = false;
  for (const char* k : kPlatoonKeys) single = single || j.contains(k);
  if (f.has("platoons")) {
    if (single) throw f.error("platoons", "cannot be combined with top-level platoon fields");
    const json& arr = f.raw("platoons");
    if (!arr.is_array() || arr.empty()) throw f.error("platoons", "expected a non-empty array");
    spec.platoons.clear();
    for (std::size_t k = 0; k < arr.size(); ++k) {
      spec.platoons.push_back(parse_platoon(arr[k], "/platoons/" + std::to_string(k), origin));
    }
  } else {
    json top = json::object();
    for (const char* k : kPlatoonKeys) {
      if (f.has(k)) top[k] = f.raw(k);
    }
    spec.platoons = {parse_platoon(top, "", origin)};
  }

  if (f.has("scenario")) spec.scenario = parse_scenario(f.raw("scenario"), "/scenario", origin, base_dir);
  spec.dt = f.number("dt", spec.dt);
  if (!(spec.dt > 0.0)) throw f.error("dt", "must be > 0");

  if (f.has("vt_micro")) {
    spec.vt_micro_path = resolve(f.text("vt_micro", ""), base_dir);
    if (!fs::exists(spec.vt_micro_path)) {
      throw f.error("vt_micro", "coefficient file '" + spec.vt_micro_path + "' does not exist");
    }
  }

  if (f.has("moe")) {
    Fields m(f.raw("moe"), "/moe", origin);
    spec.moe.station_fraction = m.number("station_fraction", spec.moe.station_fraction);
    if (m.has("station_x")) spec.moe.station_x = m.number("station_x", 0.0);
    const std::string ref = m.text("reference", reference_name(spec.moe.reference));
    if (ref == "exogenous") {
      spec.moe.reference = OutflowReference::Exogenous;
    } else if (ref == "first-member") {
      spec.moe.reference = OutflowReference::FirstMember;
    } else {
      throw m.error("reference", "expected 'exogenous' or 'first-member'");
    }
    spec.moe.ttc_star = m.number("ttc_star", spec.moe.ttc_star);
    if (!(spec.moe.ttc_star > 0.0)) throw m.error("ttc_star", "must be > 0");
    if (!(spec.moe.station_fraction > 0.0 && spec.moe.station_fraction <= 1.0)) {
      throw m.error("station_fraction", "must lie in (0, 1]");
    }
    m.finish();
  }

  if (f.has("stability")) {
    Fields s(f.raw("stability"), "/stability", origin);
    spec.grid.w_min = s.number("w_min", spec.grid.w_min);
    spec.grid.w_max = s.number("w_max", spec.grid.w_max);
    spec.grid.points = s.integer("points", spec.grid.points);
    spec.grid.refine_points = s.integer("refine_points", spec.grid.refine_points);
    spec.stability_platoon_size = s.integer("platoon_size", spec.stability_platoon_size);
    s.finish();
    if (!(spec.grid.w_min > 0.0 && spec.grid.w_max > spec.grid.w_min)) {
      throw s.error("w_max", "need 0 < w_min < w_max");
    }
    if (spec.grid.points < 2) throw s.error("points", "must be >= 2");
    if (spec.grid.refine_points < 0) throw s.error("refine_points", "must be >= 0");
    if (spec.stability_platoon_size < 2) throw s.error("platoon_size", "must be >= 2");
  }

  if (f.has("compare")) {
    Fields c(f.raw("compare"), "/compare", origin);
    if (c.has("systems")) {
      const json& arr = c.raw("systems");
      if (!arr.is_array() || arr.empty()) throw c.error("systems", "expected a non-empty array");
      for (std::size_t k = 0; k < arr.size(); ++k) {
        spec.systems.push_back(
            parse_platoon(arr[k], "/compare/systems/" + std::to_string(k), origin, false));
      }
    }
    if (c.has("n")) {
      const json& arr = c.raw("n");
      if (!arr.is_array() || arr.empty()) throw c.error("n", "expected a non-empty array of integers");
      for (const auto& v : arr) {
        if (!v.is_number_integer()) throw c.error("n", "expected a non-empty array of integers");
        const int n = v.get<int>();
        if (n < 2 || n > 64) throw c.error("n", "values must lie in [2, 64]");
        spec.n_values.push_back(n);
      }
    }
    spec.platoons_per_cell = c.integer("platoons_per_cell", spec.platoons_per_cell);
    if (spec.platoons_per_cell < 1) throw c.error("platoons_per_cell", "must be >= 1");
    c.finish();
  }

  if (f.has("sweep")) {
    Fields s(f.raw("sweep"), "/sweep", origin);
    if (!s.has("x") || !s.has("y")) throw s.error("", "needs both 'x' and 'y' axes");
    spec.sweep_x = parse_axis(s.raw("x"), "/sweep/x", origin);
    spec.sweep_y = parse_axis(s.raw("y"), "/sweep/y", origin);
    s.finish();
  }

  f.finish();
  return spec;
}

ExperimentSpec load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const fs::path parent = fs::path(path).parent_path();
  return parse_experiment(ss.str(), path, parent.empty() ? "." : parent.string());
}

std::string emit_experiment(const ExperimentSpec& spec) {
  json j;
  j["platoons"] = json::array();
  for (const auto& c : spec.platoons) j["platoons"].push_back(emit_platoon(c));
  j["scenario"] = emit_scenario(spec.scenario);
  j["dt"] = spec.dt;
  if (!spec.vt_micro_path.empty()) j["vt_micro"] = spec.vt_micro_path;
  j["moe"] = {{"station_fraction", spec.moe.station_fraction},
              {"reference", reference_name(spec.moe.reference)},
              {"ttc_star", spec.moe.ttc_star}};
  if (spec.moe.station_x) j["moe"]["station_x"] = *spec.moe.station_x;
  j["stability"] = {{"w_min", spec.grid.w_min},
                    {"w_max", spec.grid.w_max},
                    {"points", spec.grid.points},
                    {"refine_points", spec.grid.refine_points},
                    {"platoon_size", spec.stability_platoon_size}};
  if (!spec.systems.empty() || !spec.n_values.empty() || spec.platoons_per_cell != 1) {
    json c;
    c["systems"] = json::array();
    for (const auto& s : spec.systems) c["systems"].push_back(emit_platoon(s, false));
    c["n"] = spec.n_values;
    c["platoons_per_cell"] = spec.platoons_per_cell;
    if (spec.systems.empty()) c.erase("systems");
    if (spec.n_values.empty()) c.erase("n");
    j["compare"] = c;
  }
  if (spec.sweep_x && spec.sweep_y) {
    j["sweep"] = {{"x", emit_axis(*spec.sweep_x)}, {"y", emit_axis(*spec.sweep_y)}};
  }
  return j.dump(2) + "\n";
}

StabilityParams stability_params(const PlatoonConfig& cfg) {
  const PlatoonConfig e = cfg.effective();
  StabilityParams p;
  p.ctg = e.ctg;
  p.cs = e.cs;
  p.phi = e.vehicle.phi;
  return p;
}

Scenario scenario_from_flag(const std::string& flag, const Scenario& base) {
  if (flag.rfind("custom:", 0) == 0) {
    const std::string path = flag.substr(7);
    if (path.empty()) throw ConfigError("--scenario custom:<path> needs a path");
    Scenario s = Scenario::custom(load_profile_csv(path), base.duration, base.v0);
    s.validate();
    return s;
  }
  const ScenarioKind kind = scenario_kind_from_string(flag);
  if (kind == ScenarioKind::Custom) throw ConfigError("--scenario custom needs a path: custom:<path>");
  if (kind == base.kind) return base;
  Scenario s = kind == ScenarioKind::Periodic ? Scenario::periodic() : Scenario::decel_accel();
  s.duration = base.duration;
  s.v0 = base.v0;
  return s;
}

}  // namespace platoon
