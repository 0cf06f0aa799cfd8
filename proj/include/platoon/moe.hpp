#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include "platoon/simulation.hpp"

namespace platoon {

// ---- outflow ---------------------------------------------------------------

/// Which crossing starts the outflow interval. `Exogenous` measures n vehicles
/// over the n headways behind the vehicle ahead of the platoon; `FirstMember`
/// measures from vehicle 1 to vehicle n.
enum class OutflowReference { Exogenous, FirstMember };

constexpr double kStationFraction = 0.75;

/// p_0(0) + fraction * (distance the exogenous leader covers over the trace).
double default_station(const SimulationTrace& tr, double fraction = kStationFraction);

/// First time vehicle i reaches x, linearly interpolated between samples.
/// Throws MeasurementError when it never does.
double crossing_time(const SimulationTrace& tr, int i, double x);

double traffic_outflow(const SimulationTrace& tr, double station_x,
                       OutflowReference ref = OutflowReference::Exogenous);

// ---- stability / comfort ----------------------------------------------------

/// Discrete L2 ratio of the tail vehicle's acceleration to the exogenous
/// leader's. Throws MeasurementError when the leader never accelerates.
double dampening_ratio(const SimulationTrace& tr);

/// Largest forward-difference jerk over platoon vehicles 1..n.
double max_jerk(const SimulationTrace& tr);

// ---- safety -----------------------------------------------------------------

constexpr double kTtcStar = 2.0;

/// gap / closing speed, or +infinity when the follower is not faster.
double ttc_value(double gap, double closing_speed);

/// Time to collision of vehicle i (>= 1) against i-1 at step k.
double ttc(const SimulationTrace& tr, int i, std::size_t k);

double tet(const SimulationTrace& tr, double ttc_star = kTtcStar);
double tit(const SimulationTrace& tr, double ttc_star = kTtcStar);

// ---- energy / emissions -----------------------------------------------------

enum class MoeCategory { Fuel, HC, CO, NOx, CO2 };
constexpr std::array<MoeCategory, 5> kMoeCategories = {MoeCategory::Fuel, MoeCategory::HC,
                                                       MoeCategory::CO, MoeCategory::NOx,
                                                       MoeCategory::CO2};

std::string to_string(MoeCategory c);
MoeCategory moe_category_from_string(const std::string& name);

using Matrix4 = std::array<std::array<double, 4>, 4>;  // [speed power][accel power]

struct VtMicroCategory {
  std::string unit;
  Matrix4 positive{};  // used when a >= 0
  Matrix4 negative{};  // used when a < 0
};

struct VtMicroCoefficients {
  std::string speed_unit = "m/s";
  std::string accel_unit = "m/s^2";
  double speed_scale = 1.0;  // multiply m/s by this
  double accel_scale = 1.0;  // multiply m/s^2 by this
  std::map<MoeCategory, VtMicroCategory> categories;

  const VtMicroCategory& at(MoeCategory c) const;

  /// Builds a table whose regimes are both `e`.
  static VtMicroCoefficients uniform(const Matrix4& e, const std::string& speed_unit = "m/s",
                                     const std::string& accel_unit = "m/s^2");
};

/// Parses the INI-like coefficient file. The [units] block is mandatory,
/// as are all five categories.
VtMicroCoefficients parse_vt_micro(const std::string& text, const std::string& origin = "<text>");
VtMicroCoefficients load_vt_micro(const std::string& path);

/// ln(rate) for one (v, a) sample given in SI units.
double vt_micro_log_rate(const VtMicroCoefficients& c, MoeCategory cat, double v, double a);

struct VtMicroTotal {
  double total = 0.0;
  std::size_t overflow_samples = 0;
};

/// Sum of rate(t_k) * dt over vehicles [first, last] and intervals
/// [begin, end), interval k spanning [t_k, t_k + dt). last < 0 means the tail
/// vehicle; the default end covers the whole trace.
VtMicroTotal vt_micro(const SimulationTrace& tr, const VtMicroCoefficients& c, MoeCategory cat,
                      int first = 1, int last = -1, std::size_t begin = 0,
                      std::size_t end = std::numeric_limits<std::size_t>::max());

// ---- summary ----------------------------------------------------------------

struct MoeSummary {
  double outflow = 0.0;
  double dampening_ratio = 0.0;
  std::map<MoeCategory, double> emissions;
  std::size_t overflow_samples = 0;
  double tet = 0.0;
  double tit = 0.0;
  double max_jerk = 0.0;
};

struct MoeOptions {
  double station_fraction = kStationFraction;
  std::optional<double> station_x;
  OutflowReference reference = OutflowReference::Exogenous;
  double ttc_star = kTtcStar;
  bool operator==(const MoeOptions&) const = default;
};

/// All measurements on one trace. Emission totals are skipped when `coeffs`
/// is null. A MeasurementError names the failing measurement.
MoeSummary summarize(const SimulationTrace& tr, const VtMicroCoefficients* coeffs,
                     const MoeOptions& opt = {});

}  // namespace platoon
