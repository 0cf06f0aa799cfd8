#include "platoon/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "platoon/errors.hpp"

namespace platoon {

using nlohmann::json;

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

void write_trace_csv(std::ostream& out, const SimulationTrace& tr) {
  out << "t";
  for (std::size_t i = 0; i < tr.vehicles.size(); ++i) {
    for (const char* f : {"p", "v", "a", "u", "ds"}) out << ',' << f << '_' << i;
  }
  out << '\n';
  for (std::size_t k = 0; k < tr.steps(); ++k) {
    out << fixed6(tr.t[k]);
    for (const auto& vs : tr.vehicles) {
      out << ',' << fixed6(vs.p[k]) << ',' << fixed6(vs.v[k]) << ',' << fixed6(vs.a[k]) << ','
          << fixed6(vs.u[k]) << ',' << fixed6(vs.ds[k]);
    }
    out << '\n';
  }
}

std::string moe_csv_header() {
  std::string h = "system,scenario,n,r,outflow,dr";
  for (auto c : kMoeCategories) h += "," + to_string(c);
  h += ",tet,tit,jmax,overflow_samples";
  return h;
}

std::string moe_csv_row(const MoeRowKey& key, const MoeSummary& m) {
  std::ostringstream row;
  row << key.system << ',' << key.scenario << ',' << key.n << ',' << key.r << ','
      << fixed6(m.outflow) << ',' << fixed6(m.dampening_ratio);
  for (auto c : kMoeCategories) {
    row << ',';
    if (auto it = m.emissions.find(c); it != m.emissions.end()) row << fixed6(it->second);
  }
  row << ',' << fixed6(m.tet) << ',' << fixed6(m.tit) << ',' << fixed6(m.max_jerk) << ','
      << m.overflow_samples;
  return row.str();
}

// ---- stability report -------------------------------------------------------

namespace {

json finite_or_null(const std::vector<double>& xs) {
  json arr = json::array();
  for (double x : xs) {
    if (std::isfinite(x)) {
      arr.push_back(x);
    } else {
      arr.push_back(nullptr);
    }
  }
  return arr;
}

std::vector<double> numbers_or_inf(const json& arr) {
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    out.push_back(v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>());
  }
  return out;
}

json local_json(const LocalStability& l) {
  return {{"residuals", l.residuals}, {"stable", l.stable}};
}

const char* kBoolKeys[] = {"local_cs", "local_ctg", "string_spacing", "ex_head_to_tail",
                           "hybrid", "head_to_tail", "string_spacing_marginal",
                           "ex_head_to_tail_marginal"};
const char* kCurveKeys[] = {"eq14", "eq18_left", "eq18_right", "eq22"};
const char* kParamKeys[] = {"q1", "q3", "q4", "lambda", "k_s", "k_v", "k_a", "h", "phi"};

}  // namespace

std::string stability_report_json(const StabilityReport& r, const StabilityParams& p) {
  json j;
  json params;
  for (const char* k : kParamKeys) params[k] = get_stability_param(p, k);
  j["params"] = params;
  j["local_cs"] = r.local_cs.stable;
  j["local_ctg"] = r.local_ctg.stable;
  j["string_spacing"] = r.string_spacing;
  j["ex_head_to_tail"] = r.ex_head_to_tail;
  j["hybrid"] = r.hybrid;
  j["head_to_tail"] = r.head_to_tail;
  j["string_spacing_marginal"] = r.string_spacing_marginal;
  j["ex_head_to_tail_marginal"] = r.ex_head_to_tail_marginal;
  j["failing_conditions"] = r.failing_conditions;
  j["local"] = {{"cs", local_json(r.local_cs)}, {"ctg", local_json(r.local_ctg)}};
  j["singular"] = {{"eq14", r.eq14_singular}, {"eq18", r.eq18_singular}, {"b3", r.b3.singular}};
  json curves;
  curves["omega"] = r.grid;
  curves["eq14"] = finite_or_null(r.eq14);
  curves["eq18_left"] = finite_or_null(r.eq18_left);
  curves["eq18_right"] = finite_or_null(r.eq18_right);
  curves["eq22"] = finite_or_null(r.eq22);
  curves["b3"] = {{"n", r.b3.n},
                  {"values", finite_or_null(r.b3.values)},
                  {"min", r.b3.min},
                  {"max", r.b3.max}};
  j["curves"] = curves;
  return j.dump(1) + "\n";
}

void validate_stability_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("stability report: not valid JSON: ") + e.what());
  }
  auto bad = [](const std::string& where, const std::string& what) {
    return ConfigError("stability report: '" + where + "' " + what);
  };
  auto number_array = [&](const json& parent, const std::string& key, const std::string& where,
                          bool nulls) {
    if (!parent.contains(key) || !parent[key].is_array()) throw bad(where, "must be an array");
    for (const auto& v : parent[key]) {
      if (!(v.is_number() || (nulls && v.is_null()))) throw bad(where, "must hold numbers");
    }
    return parent[key].size();
  };

  if (!j.is_object()) throw bad("/", "must be an object");
  for (const char* k : kBoolKeys) {
    if (!j.contains(k) || !j[k].is_boolean()) throw bad(k, "must be a boolean");
  }
  if (!j.contains("params") || !j["params"].is_object()) throw bad("params", "must be an object");
  for (const char* k : kParamKeys) {
    if (!j["params"].contains(k) || !j["params"][k].is_number()) {
      throw bad(std::string("params/") + k, "must be a number");
    }
  }
  if (!j.contains("failing_conditions") || !j["failing_conditions"].is_array()) {
    throw bad("failing_conditions", "must be an array");
  }
  bool has14 = false, has18 = false;
  for (const auto& v : j["failing_conditions"]) {
    if (v == "eq14") {
      has14 = true;
    } else if (v == "eq18") {
      has18 = true;
    } else {
      throw bad("failing_conditions", "may only contain \"eq14\" and \"eq18\"");
    }
  }
  if (has14 == j["string_spacing"].get<bool>() || has18 == j["ex_head_to_tail"].get<bool>()) {
    throw bad("failing_conditions", "disagrees with the verdicts");
  }
  if (j["hybrid"].get<bool>() != (j["string_spacing"].get<bool>() && j["ex_head_to_tail"].get<bool>())) {
    throw bad("hybrid", "must equal string_spacing && ex_head_to_tail");
  }
  for (const char* which : {"cs", "ctg"}) {
    const std::string where = std::string("local/") + which;
    if (!j.contains("local") || !j["local"].contains(which) || !j["local"][which].is_object()) {
      throw bad(where, "must be an object");
    }
    number_array(j["local"][which], "residuals", where + "/residuals", false);
    if (!j["local"][which].contains("stable") || !j["local"][which]["stable"].is_boolean()) {
      throw bad(where + "/stable", "must be a boolean");
    }
  }
  if (!j.contains("singular") || !j["singular"].is_object()) throw bad("singular", "must be an object");
  for (const char* k : {"eq14", "eq18", "b3"}) number_array(j["singular"], k, std::string("singular/") + k, false);

  if (!j.contains("curves") || !j["curves"].is_object()) throw bad("curves", "must be an object");
  const json& c = j["curves"];
  const std::size_t len = number_array(c, "omega", "curves/omega", false);
  if (len == 0) throw bad("curves/omega", "must not be empty");
  for (std::size_t k = 1; k < len; ++k) {
    if (!(c["omega"][k].get<double>() > c["omega"][k - 1].get<double>())) {
      throw bad("curves/omega", "must be strictly increasing");
    }
  }
  for (const char* k : kCurveKeys) {
    if (number_array(c, k, std::string("curves/") + k, true) != len) {
      throw bad(std::string("curves/") + k, "length differs from omega");
    }
  }
  if (!c.contains("b3") || !c["b3"].is_object()) throw bad("curves/b3", "must be an object");
  if (!c["b3"].contains("n") || !c["b3"]["n"].is_number_integer() || c["b3"]["n"].get<int>() < 2) {
    throw bad("curves/b3/n", "must be an integer >= 2");
  }
  if (number_array(c["b3"], "values", "curves/b3/values", true) != len) {
    throw bad("curves/b3/values", "length differs from omega");
  }
  for (const char* k : {"min", "max"}) {
    if (!c["b3"].contains(k) || !c["b3"][k].is_number()) {
      throw bad(std::string("curves/b3/") + k, "must be a number");
    }
  }
}

StabilityReport stability_report_from_json(const std::string& text) {
  validate_stability_json(text);
  const json j = json::parse(text);
  StabilityReport r;
  r.local_cs.residuals = j["local"]["cs"]["residuals"].get<std::vector<double>>();
  r.local_cs.stable = j["local"]["cs"]["stable"].get<bool>();
  r.local_ctg.residuals = j["local"]["ctg"]["residuals"].get<std::vector<double>>();
  r.local_ctg.stable = j["local"]["ctg"]["stable"].get<bool>();
  r.string_spacing = j["string_spacing"].get<bool>();
  r.ex_head_to_tail = j["ex_head_to_tail"].get<bool>();
  r.hybrid = j["hybrid"].get<bool>();
  r.head_to_tail = j["head_to_tail"].get<bool>();
  r.string_spacing_marginal = j["string_spacing_marginal"].get<bool>();
  r.ex_head_to_tail_marginal = j["ex_head_to_tail_marginal"].get<bool>();
  r.failing_conditions = j["failing_conditions"].get<std::vector<std::string>>();
  r.eq14_singular = j["singular"]["eq14"].get<std::vector<double>>();
  r.eq18_singular = j["singular"]["eq18"].get<std::vector<double>>();
  const json& c = j["curves"];
  r.grid = c["omega"].get<std::vector<double>>();
  r.eq14 = numbers_or_inf(c["eq14"]);
  r.eq18_left = numbers_or_inf(c["eq18_left"]);
  r.eq18_right = numbers_or_inf(c["eq18_right"]);
  r.eq22 = numbers_or_inf(c["eq22"]);
  r.b3.n = c["b3"]["n"].get<int>();
  r.b3.values = numbers_or_inf(c["b3"]["values"]);
  r.b3.min = c["b3"]["min"].get<double>();
  r.b3.max = c["b3"]["max"].get<double>();
  r.b3.singular = j["singular"]["b3"].get<std::vector<double>>();
  return r;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

}  // namespace platoon
