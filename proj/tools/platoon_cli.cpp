#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "platoon/config.hpp"
#include "platoon/errors.hpp"
#include "platoon/experiments.hpp"
#include "platoon/report_io.hpp"

namespace fs = std::filesystem;
using namespace platoon;

namespace {

struct Options {
  std::string config;
  std::string scenario;
  std::optional<double> dt;
  std::string out;
  int jobs = 1;
};

ExperimentSpec load_with_overrides(const Options& o) {
  ExperimentSpec spec = load_experiment(o.config);
  if (!o.scenario.empty()) spec.scenario = scenario_from_flag(o.scenario, spec.scenario);
  if (o.dt) {
    if (!(*o.dt > 0.0)) throw ConfigError("--dt must be > 0");
    spec.dt = *o.dt;
  }
  return spec;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

void ensure_parent(const std::string& file) {
  const fs::path parent = fs::path(file).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
}

int cmd_simulate(const Options& o) {
  const ExperimentSpec spec = load_with_overrides(o);
  const SimulationTrace tr = run_multi(spec.platoons, spec.scenario, spec.dt);

  VtMicroCoefficients coeffs;
  if (!spec.vt_micro_path.empty()) coeffs = load_vt_micro(spec.vt_micro_path);
  const MoeSummary m = summarize(tr, spec.vt_micro_path.empty() ? nullptr : &coeffs, spec.moe);

  ensure_dir(o.out);
  std::ostringstream trace;
  write_trace_csv(trace, tr);
  write_text_file((fs::path(o.out) / "trace.csv").string(), trace.str());

  MoeRowKey key;
  key.system = system_label(spec.platoons.front());
  if (spec.platoons.size() > 1) key.system += "x" + std::to_string(spec.platoons.size());
  key.scenario = to_string(spec.scenario.kind);
  key.n = spec.platoons.front().n;
  key.r = spec.platoons.front().r;
  write_text_file((fs::path(o.out) / "moe.csv").string(),
                  moe_csv_header() + "\n" + moe_csv_row(key, m) + "\n");

  std::cout << moe_csv_header() << "\n" << moe_csv_row(key, m) << "\n";
  if (tr.collision) {
    const CollisionEvent& c = tr.collisions.front();
    std::cerr << "warning: collision flagged, first at vehicle " << c.vehicle << " t=" << c.t
              << " s\n";
  }
  return 0;
}

int cmd_stability(const Options& o) {
  const ExperimentSpec spec = load_with_overrides(o);
  const StabilityParams p = stability_params(spec.platoons.front());
  const StabilityReport r = hybrid_verdict(p.ctg, p.cs, p.phi, spec.grid, spec.stability_platoon_size);
  const std::string json = stability_report_json(r, p);
  validate_stability_json(json);
  ensure_parent(o.out);
  write_text_file(o.out, json);

  std::cout << "string_spacing=" << std::boolalpha << r.string_spacing
            << " ex_head_to_tail=" << r.ex_head_to_tail << " hybrid=" << r.hybrid;
  if (!r.failing_conditions.empty()) {
    std::cout << " failing=";
    for (std::size_t k = 0; k < r.failing_conditions.size(); ++k) {
      std::cout << (k ? "," : "") << r.failing_conditions[k];
    }
  }
  std::cout << "\n";
  return 0;
}

int cmd_compare(const Options& o) {
  const ExperimentSpec spec = load_with_overrides(o);
  const CompareResult res = run_compare(spec, o.jobs);
  ensure_dir(o.out);
  for (const auto& t : res.tables) {
    const std::string csv = compare_table_csv(t);
    write_text_file((fs::path(o.out) / ("table_" + t.metric + ".csv")).string(), csv);
    std::cout << "# " << t.metric << "\n" << csv;
  }
  return 0;
}

int cmd_sweep(const Options& o) {
  const ExperimentSpec spec = load_with_overrides(o);
  if (!spec.sweep_x || !spec.sweep_y) throw ConfigError(o.config + ": field '/sweep' is required");
  const ScanResult r = feasibility_scan(*spec.sweep_x, *spec.sweep_y,
                                        stability_params(spec.platoons.front()), spec.grid, o.jobs);
  ensure_parent(o.out);
  write_text_file(o.out, sweep_csv(r));
  std::size_t stable = 0, total = 0;
  for (const auto& row : r.hybrid) {
    for (bool b : row) {
      stable += b;
      ++total;
    }
  }
  std::cout << stable << "/" << total << " cells hybrid string stable\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid-platoon simulation, stability analysis and MOE tables"};
  app.require_subcommand(1);

  Options o;
  auto add_common = [&](CLI::App* sub, bool needs_dt, bool needs_jobs) {
    sub->add_option("--config", o.config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output path")->required();
    sub->add_option("--scenario", o.scenario, "periodic | decel-accel | custom:<csv>");
    if (needs_dt) sub->add_option("--dt", o.dt, "time step (s)");
    if (needs_jobs) sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  };
  auto* simulate = app.add_subcommand("simulate", "run one configuration, write trace and MOE CSV");
  add_common(simulate, true, false);
  auto* stability = app.add_subcommand("stability", "write the stability report JSON");
  add_common(stability, false, false);
  auto* compare = app.add_subcommand("compare", "MOE tables over systems and platoon sizes");
  add_common(compare, true, true);
  auto* sweep = app.add_subcommand("sweep", "feasibility region over two gains");
  add_common(sweep, false, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*simulate) return cmd_simulate(o);
    if (*stability) return cmd_stability(o);
    if (*compare) return cmd_compare(o);
    if (*sweep) return cmd_sweep(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
