#pragma once

#include <optional>
#include <string>
#include <vector>

#include "platoon/moe.hpp"
#include "platoon/scenario.hpp"
#include "platoon/simulation.hpp"
#include "platoon/stability.hpp"

namespace platoon {

/// Everything one config file can describe. A minimal file names only the
/// system, n and scenario; the rest falls back to per-system defaults.
struct ExperimentSpec {
  std::vector<PlatoonConfig> platoons{PlatoonConfig::hybrid(5)};
  Scenario scenario = Scenario::decel_accel();
  double dt = 0.1;
  std::string vt_micro_path;  // empty: no emission totals
  MoeOptions moe;

  // stability
  GridOptions grid;
  int stability_platoon_size = 5;

  // compare: one row per system template, one column per n
  std::vector<PlatoonConfig> systems;
  std::vector<int> n_values;
  int platoons_per_cell = 1;

  // sweep
  std::optional<ScanAxis> sweep_x;
  std::optional<ScanAxis> sweep_y;

  bool operator==(const ExperimentSpec&) const = default;
};

/// Parses a JSON config. Syntax errors report line and column; field errors
/// report the JSON path of the offending field. Relative file paths resolve
/// against `base_dir`.
ExperimentSpec parse_experiment(const std::string& text, const std::string& origin = "<config>",
                                const std::string& base_dir = ".");
ExperimentSpec load_experiment(const std::string& path);

/// Fully explicit JSON; parse_experiment(emit_experiment(s)) == s.
std::string emit_experiment(const ExperimentSpec& spec);

StabilityParams stability_params(const PlatoonConfig& cfg);

/// "periodic", "decel-accel" or "custom:<path>".
Scenario scenario_from_flag(const std::string& flag, const Scenario& base);

}  // namespace platoon
