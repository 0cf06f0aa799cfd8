#include "platoon/experiments.hpp"

#include <cstdio>
#include <exception>
#include <sstream>

#include "platoon/errors.hpp"
#include "platoon/parallel.hpp"
#include "platoon/report_io.hpp"

namespace platoon {

std::vector<std::string> compare_metrics(bool with_emissions) {
  std::vector<std::string> m{"outflow", "dr"};
  if (with_emissions) {
    for (auto c : kMoeCategories) m.push_back(to_string(c));
  }
  for (const char* k : {"tet", "tit", "jmax"}) m.emplace_back(k);
  return m;
}

double metric_value(const MoeSummary& m, const std::string& metric) {
  if (metric == "outflow") return m.outflow;
  if (metric == "dr") return m.dampening_ratio;
  if (metric == "tet") return m.tet;
  if (metric == "tit") return m.tit;
  if (metric == "jmax") return m.max_jerk;
  const MoeCategory c = moe_category_from_string(metric);
  auto it = m.emissions.find(c);
  if (it == m.emissions.end()) throw ConfigError("metric '" + metric + "' was not computed");
  return it->second;
}

std::string system_label(const PlatoonConfig& c) { return to_string(c.kind); }

namespace {

[[noreturn]] void rethrow_for_cell(const std::string& cell) {
  try {
    throw;
  } catch (const MeasurementError& e) {
    throw MeasurementError(cell + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(cell + ": " + e.what());
  } catch (const Error& e) {
    throw NumericError(cell + ": " + e.what());
  }
}

}  // namespace

CompareResult run_compare(const ExperimentSpec& spec, int jobs) {
  if (spec.systems.empty()) throw ConfigError("compare: 'compare/systems' is empty");
  if (spec.n_values.empty()) throw ConfigError("compare: 'compare/n' is empty");

  VtMicroCoefficients coeffs;
  const bool with_emissions = !spec.vt_micro_path.empty();
  if (with_emissions) coeffs = load_vt_micro(spec.vt_micro_path);

  const std::size_t rows = spec.systems.size();
  const std::size_t cols = spec.n_values.size();
  CompareResult out;
  out.summaries.assign(rows, std::vector<MoeSummary>(cols));

  parallel_for(rows * cols, jobs, [&](std::size_t idx) {
    const std::size_t row = idx / cols;
    const std::size_t col = idx % cols;
    PlatoonConfig cfg = spec.systems[row];
    cfg.n = spec.n_values[col];
    std::ostringstream cell;
    cell << "cell (" << system_label(cfg) << " r=" << cfg.r << ", n=" << cfg.n << ")";
    try {
      const std::vector<PlatoonConfig> chain(static_cast<std::size_t>(spec.platoons_per_cell), cfg);
      const SimulationTrace tr = run_multi(chain, spec.scenario, spec.dt);
      out.summaries[row][col] = summarize(tr, with_emissions ? &coeffs : nullptr, spec.moe);
    } catch (const Error&) {
      rethrow_for_cell(cell.str());
    }
  });

  for (const auto& metric : compare_metrics(with_emissions)) {
    CompareTable t;
    t.metric = metric;
    t.n_values = spec.n_values;
    for (std::size_t row = 0; row < rows; ++row) {
      t.systems.push_back(system_label(spec.systems[row]));
      t.r_values.push_back(spec.systems[row].r);
      std::vector<double> cells;
      double sum = 0.0;
      for (std::size_t col = 0; col < cols; ++col) {
        cells.push_back(metric_value(out.summaries[row][col], metric));
        sum += cells.back();
      }
      t.cells.push_back(std::move(cells));
      t.averages.push_back(sum / static_cast<double>(cols));
    }
    out.tables.push_back(std::move(t));
  }
  return out;
}

std::string compare_table_csv(const CompareTable& t) {
  std::ostringstream out;
  out << "system,r";
  for (int n : t.n_values) out << ",n=" << n;
  out << ",average\n";
  for (std::size_t row = 0; row < t.cells.size(); ++row) {
    out << t.systems[row] << ',' << t.r_values[row];
    for (double x : t.cells[row]) out << ',' << fixed6(x);
    out << ',' << fixed6(t.averages[row]) << '\n';
  }
  return out.str();
}

std::string sweep_csv(const ScanResult& r) {
  std::ostringstream out;
  out << r.x_name << ',' << r.y_name << ",hybrid\n";
  char buf[64];
  for (std::size_t iy = 0; iy < r.ys.size(); ++iy) {
    for (std::size_t ix = 0; ix < r.xs.size(); ++ix) {
      std::snprintf(buf, sizeof buf, "%.10g,%.10g,", r.xs[ix], r.ys[iy]);
      out << buf << (r.hybrid[iy][ix] ? "true" : "false") << '\n';
    }
  }
  return out.str();
}

}  // namespace platoon
