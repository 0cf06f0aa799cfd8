#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "platoon/moe.hpp"
#include "platoon/simulation.hpp"
#include "platoon/stability.hpp"

namespace platoon {

/// Fixed 6-decimal rendering; negative zero prints as zero so reruns diff
/// cleanly.
std::string fixed6(double x);

/// Columns t, then p_i, v_i, a_i, u_i, ds_i for every vehicle i = 0..n.
void write_trace_csv(std::ostream& out, const SimulationTrace& tr);

struct MoeRowKey {
  std::string system;
  std::string scenario;
  int n = 0;
  int r = 0;
};

std::string moe_csv_header();
/// Emission columns are left empty when the summary has no totals.
std::string moe_csv_row(const MoeRowKey& key, const MoeSummary& m);

/// Serialized report; +infinity is written as null.
std::string stability_report_json(const StabilityReport& r, const StabilityParams& p);

/// Throws ConfigError describing the first schema violation.
void validate_stability_json(const std::string& text);

StabilityReport stability_report_from_json(const std::string& text);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace platoon
