#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "platoon/config.hpp"
#include "platoon/errors.hpp"
#include "platoon/experiments.hpp"
#include "platoon/report_io.hpp"

using namespace platoon;
namespace fs = std::filesystem;

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_experiment(text, "cfg.json", PLATOON_SOURCE_DIR);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string tmp_dir(const std::string& leaf) {
  const fs::path p = fs::temp_directory_path() / ("platoon_unit_" + leaf);
  fs::create_directories(p);
  return p.string();
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("minimal file falls back to defaults") {
    const ExperimentSpec s = parse_experiment(R"({"system": "HYBRID", "n": 7, "scenario": {"kind": "periodic"}})");
    REQUIRE(s.platoons.size() == 1);
    CHECK(s.platoons[0].kind == PlatoonKind::Hybrid);
    CHECK(s.platoons[0].n == 7);
    CHECK(s.platoons[0].ctg == PlatoonConfig::hybrid(7).ctg);
    CHECK(s.platoons[0].cs == PlatoonConfig::hybrid(7).cs);
    CHECK(s.platoons[0].vehicle == VehicleParams{});
    CHECK(s.scenario == Scenario::periodic());
    CHECK(s.dt == 0.1);
    CHECK(parse_experiment("{}") == ExperimentSpec{});
  }

  TEST_CASE("per-system defaults") {
    const ExperimentSpec s = parse_experiment(R"({"system": "ctg", "r": 3, "n": 4})");
    CHECK(s.platoons[0] == PlatoonConfig::ctg_platoon(4, 3).effective());
    CHECK(parse_experiment(R"({"system": "CS", "n": 4})").platoons[0] ==
          PlatoonConfig::cs_platoon(4).effective());
  }

  TEST_CASE("comments are accepted") {
    CHECK_NOTHROW(parse_experiment("// header\n{\n  \"n\": 4 /* inline */\n}\n"));
  }

  TEST_CASE("emitted files reparse to the same spec") {
    ExperimentSpec s;
    s.platoons = {PlatoonConfig::hybrid(4), PlatoonConfig::ctg_platoon(3, 3)};
    s.platoons[0].cs.lambda = 0.2;
    s.platoons[0].exogenous_leader = LeaderKind::AvHdv;
    s.platoons[1].vehicle.phi = 0.45;
    s.scenario = Scenario::custom({{0.0, 0.0}, {1.0, -1.5}, {2.5, 0.25}}, 40.0, 22.0);
    s.dt = 0.05;
    s.vt_micro_path = fs::absolute(fs::path(PLATOON_SOURCE_DIR) / "data/vt_micro_coefficients.txt")
                          .lexically_normal()
                          .string();
    s.moe.reference = OutflowReference::FirstMember;
    s.moe.station_x = 1234.5;
    s.moe.ttc_star = 3.0;
    s.grid = {1e-2, 1e2, 321, 17};
    s.stability_platoon_size = 9;
    s.systems = {PlatoonConfig::hybrid(2), PlatoonConfig::cs_platoon(2)};
    s.n_values = {4, 5, 6};
    s.platoons_per_cell = 2;
    s.sweep_x = ScanAxis{"lambda", 0.05, 0.5, 4};
    s.sweep_y = ScanAxis{"q4", 0.2, 1.0, 3};
    const std::string once = emit_experiment(s);
    const ExperimentSpec back = parse_experiment(once);
    CHECK(back == s);
    CHECK(emit_experiment(back) == once);

    const ExperimentSpec periodic = parse_experiment(R"({"scenario": {"kind": "periodic", "period": 17.25}})");
    CHECK(parse_experiment(emit_experiment(periodic)) == periodic);
  }

  TEST_CASE("syntax errors carry line and column") {
    const std::string msg = message_of("{\n  \"n\": 4,\n  \"dt\": ,\n}\n");
    CHECK(msg.find("cfg.json:3:") == 0);
    CHECK(msg.find("syntax error") != std::string::npos);
  }

  TEST_CASE("field errors carry the path") {
    CHECK(message_of(R"({"n": "four"})").find("'/n'") != std::string::npos);
    CHECK(message_of(R"({"cs": {"lambda": "x"}})").find("'/cs/lambda'") != std::string::npos);
    CHECK(message_of(R"({"platoons": [{"n": 4}, {"n": 4, "ctg": {"k_z": 1}}]})").find("'/platoons/1/ctg/k_z'") !=
          std::string::npos);
    CHECK(message_of(R"({"scenario": {"kind": "sawtooth"}})").find("'/scenario/kind'") != std::string::npos);
    CHECK(message_of(R"({"system": "ACC"})").find("'/system'") != std::string::npos);
    CHECK(message_of(R"({"n": 4, "platoons": [{"n": 4}]})").find("'/platoons'") != std::string::npos);
  }

  TEST_CASE("unknown fields are rejected") {
    CHECK(message_of(R"({"n": 4, "colour": "red"})").find("'/colour': unknown field") != std::string::npos);
    CHECK(message_of(R"({"moe": {"station": 3}})").find("'/moe/station'") != std::string::npos);
  }

  TEST_CASE("bounds") {
    CHECK(message_of(R"({"n": 1})").find("n must be >= 2") != std::string::npos);
    CHECK_FALSE(message_of(R"({"system": "CTG", "r": 5})").empty());
    CHECK_FALSE(message_of(R"({"cs": {"q3": -1}})").empty());
    CHECK(message_of(R"({"compare": {"n": [4, 65]}})").find("'/compare/n'") != std::string::npos);
    CHECK(message_of(R"({"dt": 0})").find("'/dt'") != std::string::npos);
    CHECK(message_of(R"({"moe": {"station_fraction": 1.5}})").find("station_fraction") != std::string::npos);
    CHECK(message_of(R"({"sweep": {"x": {"name": "mu", "min": 0, "max": 1, "resolution": 3},
                                   "y": {"name": "q4", "min": 0, "max": 1, "resolution": 3}}})")
              .find("'/sweep/x'") != std::string::npos);
    CHECK(message_of(R"({"vehicle": {"phi": -0.5}})").find("'/vehicle'") != std::string::npos);
  }

  TEST_CASE("coefficient files must exist") {
    CHECK(message_of(R"({"vt_micro": "data/vt_micro_coefficients.txt"})").empty());
    CHECK(message_of(R"({"vt_micro": "data/missing.txt"})").find("'/vt_micro'") != std::string::npos);
  }

  TEST_CASE("profiles load relative to the config") {
    const std::string dir = tmp_dir("profile");
    {
      std::ofstream out(dir + "/p.csv");
      out << "t,a\n0,0\n10,-2\n20,0\n";
    }
    const ExperimentSpec s =
        parse_experiment(R"({"scenario": {"kind": "custom", "profile": "p.csv", "duration": 30}})", "c", dir);
    CHECK(s.scenario.kind == ScenarioKind::Custom);
    CHECK(s.scenario.samples.size() == 3);
    CHECK(exogenous_profile(s.scenario, 5.0) == doctest::Approx(-1.0));
    {
      std::ofstream out(dir + "/bad.csv");
      out << "t,a\n0,0\n1,x\n";
    }
    CHECK_THROWS_AS(load_profile_csv(dir + "/bad.csv"), ConfigError);
  }

  TEST_CASE("scenario flag") {
    const Scenario base = Scenario::decel_accel();
    CHECK(scenario_from_flag("periodic", base).kind == ScenarioKind::Periodic);
    CHECK(scenario_from_flag("decel-accel", base) == base);
    CHECK_THROWS_AS(scenario_from_flag("custom", base), ConfigError);
    CHECK_THROWS_AS(scenario_from_flag("zigzag", base), ConfigError);
    const std::string dir = tmp_dir("flag");
    {
      std::ofstream out(dir + "/p.csv");
      out << "0,0.5\n5,0\n";
    }
    const Scenario c = scenario_from_flag("custom:" + dir + "/p.csv", base);
    CHECK(c.kind == ScenarioKind::Custom);
    CHECK(c.duration == base.duration);
  }

  TEST_CASE("stability parameters follow the platoon") {
    PlatoonConfig c = PlatoonConfig::hybrid(5);
    c.cs.lambda = 0.3;
    c.vehicle.phi = 0.4;
    const StabilityParams p = stability_params(c);
    CHECK(p.cs.lambda == 0.3);
    CHECK(p.phi == 0.4);
    CHECK(p.ctg == c.ctg);
  }
}

TEST_SUITE("report") {
  TEST_CASE("fixed formatting") {
    CHECK(fixed6(-0.0) == "0.000000");
    CHECK(fixed6(-1e-9) == "0.000000");
    CHECK(fixed6(1.5) == "1.500000");
  }

  TEST_CASE("trace csv layout") {
    const SimulationTrace tr = run(PlatoonConfig::hybrid(2), Scenario::cruise(20.0, 1.0));
    std::ostringstream out;
    write_trace_csv(out, tr);
    const std::string s = out.str();
    CHECK(s.rfind("t,p_0,v_0,a_0,u_0,ds_0,p_1,", 0) == 0);
    CHECK(count_lines(s) == tr.steps() + 1);
    std::istringstream in(s);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    std::size_t commas = 0;
    for (char ch : row) commas += ch == ',';
    CHECK(commas == 3 * 5);
  }

  TEST_CASE("moe row layout") {
    MoeSummary m;
    m.outflow = 1.25;
    m.dampening_ratio = 0.95;
    const std::string row = moe_csv_row({"HYBRID", "decel-accel", 5, 2}, m);
    CHECK(moe_csv_header() == "system,scenario,n,r,outflow,dr,fuel,hc,co,nox,co2,tet,tit,jmax,overflow_samples");
    CHECK(row == "HYBRID,decel-accel,5,2,1.250000,0.950000,,,,,,0.000000,0.000000,0.000000,0");
    m.emissions[MoeCategory::CO] = 2.0;
    CHECK(moe_csv_row({"CS", "periodic", 4, 2}, m).find(",,2.000000,,") != std::string::npos);
  }

  TEST_CASE("stability report survives its own schema") {
    for (double lambda : {0.1, 0.3}) {
      StabilityParams p;
      p.cs.lambda = lambda;
      const StabilityReport r = hybrid_verdict(p.ctg, p.cs, p.phi, {1e-3, 1e3, 300, 40}, 5);
      const std::string text = stability_report_json(r, p);
      CHECK_NOTHROW(validate_stability_json(text));
      const StabilityReport back = stability_report_from_json(text);
      CHECK(back.hybrid == r.hybrid);
      CHECK(back.grid == r.grid);
      CHECK(back.failing_conditions == r.failing_conditions);
      CHECK(stability_report_json(back, p) == text);
      const auto j = nlohmann::json::parse(text);
      CHECK(j["hybrid"].get<bool>() == (lambda == 0.1));
    }
  }

  TEST_CASE("tampered reports are caught") {
    StabilityParams p;
    p.cs.lambda = 0.3;
    const StabilityReport r = hybrid_verdict(p.ctg, p.cs, p.phi, {1e-3, 1e3, 100, 10}, 5);
    const auto good = nlohmann::json::parse(stability_report_json(r, p));
    auto expect_bad = [](nlohmann::json j) { CHECK_THROWS_AS(validate_stability_json(j.dump()), ConfigError); };
    auto j = good;
    j["hybrid"] = true;
    expect_bad(j);
    j = good;
    j["failing_conditions"] = nlohmann::json::array();
    expect_bad(j);
    j = good;
    j["curves"]["eq14"].erase(0);
    expect_bad(j);
    j = good;
    std::swap(j["curves"]["omega"][0], j["curves"]["omega"][1]);
    expect_bad(j);
    j = good;
    j.erase("params");
    expect_bad(j);
    CHECK_THROWS_AS(validate_stability_json("{not json"), ConfigError);
  }

  TEST_CASE("single-cell comparison") {
    ExperimentSpec s;
    s.systems = {PlatoonConfig::hybrid(2)};
    s.n_values = {4};
    const CompareResult r = run_compare(s);
    REQUIRE(r.tables.size() == compare_metrics(false).size());
    for (const auto& t : r.tables) {
      CHECK(t.cells.size() == 1);
      CHECK(t.cells[0].size() == 1);
      CHECK(t.averages[0] == t.cells[0][0]);
    }
    CHECK(compare_table_csv(r.tables[1]).rfind("system,r,n=4,average\nHYBRID,2,", 0) == 0);
  }

  TEST_CASE("averages and thread count") {
    ExperimentSpec s;
    s.systems = {PlatoonConfig::hybrid(2), PlatoonConfig::cs_platoon(2), PlatoonConfig::ctg_platoon(2, 2)};
    s.n_values = {4, 5, 6, 7};
    s.vt_micro_path = std::string(PLATOON_SOURCE_DIR) + "/data/vt_micro_coefficients.txt";
    const CompareResult one = run_compare(s, 1);
    const CompareResult four = run_compare(s, 4);
    REQUIRE(one.tables.size() == compare_metrics(true).size());
    for (std::size_t k = 0; k < one.tables.size(); ++k) {
      const auto& t = one.tables[k];
      CHECK(compare_table_csv(t) == compare_table_csv(four.tables[k]));
      for (std::size_t row = 0; row < t.cells.size(); ++row) {
        double sum = 0.0;
        for (double x : t.cells[row]) sum += x;
        CHECK(std::abs(t.averages[row] - sum / 4.0) < 1e-12);
      }
    }
  }

  TEST_CASE("a failing cell is named") {
    ExperimentSpec s;
    PlatoonConfig broken = PlatoonConfig::cs_platoon(2);
    broken.vehicle.phi = -1.0;
    s.systems = {PlatoonConfig::hybrid(2), broken};
    s.n_values = {4, 5};
    try {
      run_compare(s, 1);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("cell (CS r=2, n=4)") != std::string::npos);
    }
    s.systems = {PlatoonConfig::hybrid(2)};
    s.moe.station_fraction = 1.0;
    CHECK_THROWS_AS(run_compare(s, 2), MeasurementError);
  }

  TEST_CASE("sweep csv") {
    StabilityParams fixed;
    const ScanResult r = feasibility_scan({"lambda", 0.1, 0.3, 2}, {"q4", 0.5, 0.6, 2}, fixed,
                                          {1e-3, 1e3, 300, 20});
    const std::string csv = sweep_csv(r);
    CHECK(csv.rfind("lambda,q4,hybrid\n", 0) == 0);
    CHECK(count_lines(csv) == 5);
    CHECK(csv.find("0.1,0.6,true") != std::string::npos);
    CHECK(csv.find("0.3,0.6,false") != std::string::npos);
  }
}
