#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& leaf) {
  const fs::path p = fs::temp_directory_path() / ("platoon_cli_" + leaf);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Result cli(const std::string& args, const fs::path& dir) {
  const std::string cmd = std::string("\"") + PLATOON_CLI_PATH + "\" " + args + " > \"" +
                          (dir / "stdout.txt").string() + "\" 2> \"" + (dir / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "stdout.txt");
  r.err = slurp(dir / "stderr.txt");
  return r;
}

std::string config(const std::string& name) { return std::string(PLATOON_SOURCE_DIR) + "/configs/" + name; }

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Value of `column` in the single data row of a two-line CSV.
double csv_field(const std::string& csv, const std::string& column) {
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  std::istringstream hs(header), rs(row);
  std::string h, v;
  while (std::getline(hs, h, ',')) {
    std::getline(rs, v, ',');
    if (h == column) return std::stod(v);
  }
  return -1.0;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("simulate writes both files and the dampening ratio") {
    const fs::path dir = scratch("simulate");
    const Result r = cli("simulate --config \"" + config("simulate_hybrid_s2.json") + "\" --out \"" +
                             (dir / "run").string() + "\"", dir);
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "run/trace.csv"));
    const std::string moe = slurp(dir / "run/moe.csv");
    CHECK(std::abs(csv_field(moe, "dr") - 0.95) < 0.05);
    CHECK(csv_field(moe, "fuel") > 0.0);
    CHECK(csv_field(moe, "tet") == 0.0);
  }

  TEST_CASE("reruns are byte-identical") {
    const fs::path dir = scratch("rerun");
    for (const char* leaf : {"a", "b"}) {
      const Result r = cli("simulate --config \"" + config("simulate_hybrid_s1.json") + "\" --out \"" +
                               (dir / leaf).string() + "\"", dir);
      REQUIRE(r.code == 0);
    }
    CHECK(slurp(dir / "a/trace.csv") == slurp(dir / "b/trace.csv"));
    CHECK(slurp(dir / "a/moe.csv") == slurp(dir / "b/moe.csv"));
  }

  TEST_CASE("scenario and step flags override the file") {
    const fs::path dir = scratch("override");
    const Result r = cli("simulate --config \"" + config("simulate_hybrid_s2.json") +
                             "\" --scenario periodic --dt 0.05 --out \"" + (dir / "run").string() + "\"", dir);
    REQUIRE(r.code == 0);
    CHECK(r.out.find(",periodic,") != std::string::npos);
    std::istringstream trace(slurp(dir / "run/trace.csv"));
    std::string line;
    std::getline(trace, line);
    std::getline(trace, line);
    std::getline(trace, line);
    CHECK(line.rfind("0.050000,", 0) == 0);
  }

  TEST_CASE("malformed config exits 2 and names the field") {
    const fs::path dir = scratch("malformed");
    write(dir / "bad.json", R"({"system": "HYBRID", "n": 5, "cs": {"lambda": "fast"}})");
    const Result r = cli("simulate --config \"" + (dir / "bad.json").string() + "\" --out \"" +
                             (dir / "o").string() + "\"", dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("/cs/lambda") != std::string::npos);

    write(dir / "broken.json", "{\"n\": 5,,}");
    const Result s = cli("simulate --config \"" + (dir / "broken.json").string() + "\" --out \"" +
                             (dir / "o").string() + "\"", dir);
    CHECK(s.code == 2);
    CHECK(s.err.find("broken.json:1:") != std::string::npos);

    const Result t = cli("simulate --out x", dir);
    CHECK(t.code == 2);
    const Result u = cli("simulate --config \"" + config("simulate_hybrid_s2.json") +
                             "\" --scenario bogus --out \"" + (dir / "o").string() + "\"", dir);
    CHECK(u.code == 2);
  }

  TEST_CASE("unreachable station exits 4") {
    const fs::path dir = scratch("station");
    write(dir / "far.json", R"({"n": 4, "moe": {"station_fraction": 1.0}})");
    const Result r = cli("simulate --config \"" + (dir / "far.json").string() + "\" --out \"" +
                             (dir / "o").string() + "\"", dir);
    CHECK(r.code == 4);
    CHECK(r.err.find("never reaches") != std::string::npos);
  }

  TEST_CASE("numeric blow-up exits 3") {
    const fs::path dir = scratch("blowup");
    write(dir / "wild.json",
          R"({"n": 4, "scenario": {"kind": "custom", "duration": 60, "samples": [[0, 0], [1, 1e306]]}})");
    const Result r = cli("simulate --config \"" + (dir / "wild.json").string() + "\" --out \"" +
                             (dir / "o").string() + "\"", dir);
    CHECK(r.code == 3);
    CHECK(r.err.find("step") != std::string::npos);
  }

  TEST_CASE("stability verdicts") {
    const fs::path dir = scratch("stability");
    const Result a = cli("stability --config \"" + config("stability_lambda01.json") + "\" --out \"" +
                             (dir / "a.json").string() + "\"", dir);
    REQUIRE(a.code == 0);
    const auto ja = nlohmann::json::parse(slurp(dir / "a.json"));
    CHECK(ja["hybrid"] == true);

    const Result b = cli("stability --config \"" + config("stability_lambda03.json") + "\" --out \"" +
                             (dir / "b.json").string() + "\"", dir);
    REQUIRE(b.code == 0);
    const auto jb = nlohmann::json::parse(slurp(dir / "b.json"));
    CHECK(jb["hybrid"] == false);
    CHECK(jb["failing_conditions"] == nlohmann::json::array({"eq18"}));
    CHECK(b.out.find("failing=eq18") != std::string::npos);
  }

  TEST_CASE("compare writes one table per metric") {
    const fs::path dir = scratch("compare");
    write(dir / "spec.json", R"({
      "scenario": {"kind": "decel-accel"},
      "compare": {"systems": [{"system": "HYBRID"}, {"system": "CS"}], "n": [4, 5]}
    })");
    const Result r = cli("compare --config \"" + (dir / "spec.json").string() + "\" --jobs 3 --out \"" +
                             (dir / "tables").string() + "\"", dir);
    REQUIRE(r.code == 0);
    for (const char* m : {"outflow", "dr", "tet", "tit", "jmax"}) CHECK(fs::exists(dir / "tables" / ("table_" + std::string(m) + ".csv")));
    const std::string dr = slurp(dir / "tables/table_dr.csv");
    CHECK(dr.rfind("system,r,n=4,n=5,average\nHYBRID,2,", 0) == 0);
    CHECK(dr.find("\nCS,2,") != std::string::npos);
  }

  TEST_CASE("sweep grid") {
    const fs::path dir = scratch("sweep");
    write(dir / "spec.json", R"({
      "stability": {"points": 300, "refine_points": 20},
      "sweep": {"x": {"name": "lambda", "min": 0.1, "max": 0.3, "resolution": 2},
                "y": {"name": "q4", "min": 0.5, "max": 0.6, "resolution": 2}}
    })");
    const Result a = cli("sweep --config \"" + (dir / "spec.json").string() + "\" --jobs 2 --out \"" +
                             (dir / "a.csv").string() + "\"", dir);
    const Result b = cli("sweep --config \"" + (dir / "spec.json").string() + "\" --out \"" +
                             (dir / "b.csv").string() + "\"", dir);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    const std::string csv = slurp(dir / "a.csv");
    CHECK(csv == slurp(dir / "b.csv"));
    std::size_t lines = 0;
    for (char c : csv) lines += c == '\n';
    CHECK(lines == 5);
    CHECK(csv.find("true") != std::string::npos);
    CHECK(csv.find("false") != std::string::npos);

    write(dir / "nosweep.json", "{}");
    CHECK(cli("sweep --config \"" + (dir / "nosweep.json").string() + "\" --out \"" + (dir / "c.csv").string() + "\"", dir)
              .code == 2);
  }
}
