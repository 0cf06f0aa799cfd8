#pragma once

#include <string>
#include <utility>
#include <vector>

namespace platoon {

enum class ScenarioKind { Periodic, DecelAccel, Custom };

/// Exogenous-leader disturbance. The leader starts at speed `v0` and its
/// acceleration follows `exogenous_profile`.
struct Scenario {
  ScenarioKind kind = ScenarioKind::DecelAccel;
  double duration = 120.0;
  double v0 = 30.0;

  // Periodic: amplitude * sin(2 pi t / period) while t < active, then 0.
  // The default period fits 13 whole cycles into the 80 s window.
  double amplitude = 2.3;
  double period = 80.0 / 13.0;
  double active = 80.0;

  // DecelAccel: cruise, brake to low_speed, hold, recover to v0.
  double cruise_time = 30.0;
  double low_speed = 10.0;
  double deceleration = -2.5;
  double hold_time = 30.0;
  double acceleration = 2.5;

  // Custom: (t, a) samples, linearly interpolated and clamped at both ends.
  std::vector<std::pair<double, double>> samples;
  bool operator==(const Scenario&) const = default;

  void validate() const;

  static Scenario periodic();
  static Scenario decel_accel();
  /// Zero-disturbance run at constant speed.
  static Scenario cruise(double v0, double duration);
  static Scenario custom(std::vector<std::pair<double, double>> samples, double duration,
                         double v0);
};

double exogenous_profile(const Scenario& s, double t);

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& name);

/// Reads a two-column CSV (t, a) with optional header.
std::vector<std::pair<double, double>> load_profile_csv(const std::string& path);

}  // namespace platoon
