#pragma once

#include <string>
#include <vector>

#include "platoon/config.hpp"
#include "platoon/moe.hpp"

namespace platoon {

/// Metric identifiers used for compare tables, in output order.
std::vector<std::string> compare_metrics(bool with_emissions);
double metric_value(const MoeSummary& m, const std::string& metric);

/// Label of a system row, e.g. "HYBRID" or "CTG".
std::string system_label(const PlatoonConfig& c);

struct CompareTable {
  std::string metric;
  std::vector<int> n_values;
  std::vector<std::string> systems;
  std::vector<int> r_values;
  std::vector<std::vector<double>> cells;  // [row][column]
  std::vector<double> averages;
};

struct CompareResult {
  std::vector<CompareTable> tables;
  std::vector<std::vector<MoeSummary>> summaries;  // [row][column]
};

/// Runs every (system, n) cell, fanned across `jobs` threads. A failing cell
/// aborts the comparison with the cell named in the error.
CompareResult run_compare(const ExperimentSpec& spec, int jobs = 1);

std::string compare_table_csv(const CompareTable& t);

/// CSV header "<x>,<y>,hybrid", one row per grid cell, y-major.
std::string sweep_csv(const ScanResult& r);

}  // namespace platoon
