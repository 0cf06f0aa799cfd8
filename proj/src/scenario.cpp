#include "platoon/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "platoon/errors.hpp"

namespace platoon {

namespace {
constexpr double kTimeSlack = 1e-9;
}

void Scenario::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("scenario: duration must be > 0");
  if (!std::isfinite(v0)) throw ConfigError("scenario: v0 must be finite");
  switch (kind) {
    case ScenarioKind::Periodic:
      if (!(period > 0.0)) throw ConfigError("scenario: period must be > 0");
      if (!(active >= 0.0)) throw ConfigError("scenario: active window must be >= 0");
      if (!std::isfinite(amplitude)) throw ConfigError("scenario: amplitude must be finite");
      break;
    case ScenarioKind::DecelAccel:
      if (!(deceleration < 0.0)) throw ConfigError("scenario: deceleration must be < 0");
      if (!(acceleration > 0.0)) throw ConfigError("scenario: acceleration must be > 0");
      if (!(low_speed >= 0.0 && low_speed <= v0)) throw ConfigError("scenario: need 0 <= low_speed <= v0");
      if (!(cruise_time >= 0.0 && hold_time >= 0.0)) throw ConfigError("scenario: phase times must be >= 0");
      break;
    case ScenarioKind::Custom:
      if (samples.empty()) throw ConfigError("scenario: custom profile has no samples");
      for (std::size_t k = 1; k < samples.size(); ++k) {
        if (!(samples[k].first > samples[k - 1].first)) {
          throw ConfigError("scenario: custom profile times must be strictly increasing");
        }
      }
      break;
  }
}

Scenario Scenario::periodic() {
  Scenario s;
  s.kind = ScenarioKind::Periodic;
  return s;
}

Scenario Scenario::decel_accel() {
  Scenario s;
  s.kind = ScenarioKind::DecelAccel;
  return s;
}

Scenario Scenario::cruise(double v0, double duration) {
  return custom({{0.0, 0.0}}, duration, v0);
}

Scenario Scenario::custom(std::vector<std::pair<double, double>> samples, double duration,
                          double v0) {
  Scenario s;
  s.kind = ScenarioKind::Custom;
  s.samples = std::move(samples);
  s.duration = duration;
  s.v0 = v0;
  return s;
}

double exogenous_profile(const Scenario& s, double t) {
  if (!(t >= -kTimeSlack && t <= s.duration + kTimeSlack)) {
    std::ostringstream msg;
    msg << "exogenous_profile: t=" << t << " outside [0, " << s.duration << "]";
    throw RangeError(msg.str());
  }
  switch (s.kind) {
    case ScenarioKind::Periodic:
      if (t + kTimeSlack >= s.active) return 0.0;
      return s.amplitude * std::sin(2.0 * std::numbers::pi * t / s.period);

    case ScenarioKind::DecelAccel: {
      const double brake_end = s.cruise_time + (s.low_speed - s.v0) / s.deceleration;
      const double hold_end = brake_end + s.hold_time;
      const double recover_end = hold_end + (s.v0 - s.low_speed) / s.acceleration;
      // Phase boundaries are closed on the left; k*dt lands a few ulps off.
      const double tt = t + kTimeSlack;
      if (tt < s.cruise_time) return 0.0;
      if (tt < brake_end) return s.deceleration;
      if (tt < hold_end) return 0.0;
      if (tt < recover_end) return s.acceleration;
      return 0.0;
    }

    case ScenarioKind::Custom: {
      const auto& pts = s.samples;
      if (t <= pts.front().first) return pts.front().second;
      if (t >= pts.back().first) return pts.back().second;
      auto hi = std::upper_bound(pts.begin(), pts.end(), t,
                                 [](double x, const auto& pt) { return x < pt.first; });
      auto lo = hi - 1;
      const double w = (t - lo->first) / (hi->first - lo->first);
      return lo->second + w * (hi->second - lo->second);
    }
  }
  return 0.0;
}

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Periodic: return "periodic";
    case ScenarioKind::DecelAccel: return "decel-accel";
    case ScenarioKind::Custom: return "custom";
  }
  return "?";
}

ScenarioKind scenario_kind_from_string(const std::string& name) {
  if (name == "periodic") return ScenarioKind::Periodic;
  if (name == "decel-accel") return ScenarioKind::DecelAccel;
  if (name == "custom") return ScenarioKind::Custom;
  throw ConfigError("unknown scenario '" + name + "' (expected periodic, decel-accel or custom)");
}

std::vector<std::pair<double, double>> load_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open custom profile '" + path + "'");
  std::vector<std::pair<double, double>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double t = 0.0, a = 0.0;
    if (!(ss >> t >> a)) {
      if (out.empty() && lineno == 1) continue;  // header
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 't, a'");
    }
    out.emplace_back(t, a);
  }
  if (out.empty()) throw ConfigError("custom profile '" + path + "' has no samples");
  return out;
}

}  // namespace platoon
