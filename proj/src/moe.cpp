#include "platoon/moe.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "platoon/errors.hpp"

namespace platoon {

namespace {

double sq(double x) { return x * x; }

void require_trace(const SimulationTrace& tr) {
  if (tr.vehicles.size() < 2 || tr.steps() == 0) {
    throw MeasurementError("trace has no platoon vehicles");
  }
}

}  // namespace

// ---- outflow ---------------------------------------------------------------

double default_station(const SimulationTrace& tr, double fraction) {
  require_trace(tr);
  const auto& p0 = tr.vehicles[0].p;
  return p0.front() + fraction * (p0.back() - p0.front());
}

double crossing_time(const SimulationTrace& tr, int i, double x) {
  const auto& p = tr.vehicles.at(static_cast<std::size_t>(i)).p;
  if (p.front() >= x) return tr.t.front();
  for (std::size_t k = 1; k < p.size(); ++k) {
    if (p[k] >= x) {
      const double w = (x - p[k - 1]) / (p[k] - p[k - 1]);
      return tr.t[k - 1] + w * (tr.t[k] - tr.t[k - 1]);
    }
  }
  std::ostringstream msg;
  msg << "outflow: vehicle " << i << " never reaches station x=" << x << " m";
  throw MeasurementError(msg.str());
}

double traffic_outflow(const SimulationTrace& tr, double station_x, OutflowReference ref) {
  require_trace(tr);
  const int n = tr.platoon_size();
  const double t_start = crossing_time(tr, ref == OutflowReference::Exogenous ? 0 : 1, station_x);
  const double t_end = crossing_time(tr, n, station_x);
  if (!(t_end > t_start)) {
    throw MeasurementError("outflow: zero crossing interval at the station");
  }
  return static_cast<double>(n) / (t_end - t_start);
}

// ---- stability / comfort ----------------------------------------------------

double dampening_ratio(const SimulationTrace& tr) {
  require_trace(tr);
  double num = 0.0, den = 0.0;
  const auto& a0 = tr.vehicles.front().a;
  const auto& an = tr.vehicles.back().a;
  for (std::size_t k = 0; k < tr.steps(); ++k) {
    num += sq(an[k]);
    den += sq(a0[k]);
  }
  if (!(den > 0.0)) throw MeasurementError("dampening ratio undefined: exogenous acceleration is zero");
  return std::sqrt(num) / std::sqrt(den);
}

double max_jerk(const SimulationTrace& tr) {
  require_trace(tr);
  double best = 0.0;
  for (std::size_t i = 1; i < tr.vehicles.size(); ++i) {
    const auto& a = tr.vehicles[i].a;
    for (std::size_t k = 1; k < a.size(); ++k) best = std::max(best, std::abs(a[k] - a[k - 1]));
  }
  return best / tr.dt;
}

// ---- safety -----------------------------------------------------------------

double ttc_value(double gap, double closing_speed) {
  if (closing_speed > 0.0) return gap / closing_speed;
  return std::numeric_limits<double>::infinity();
}

double ttc(const SimulationTrace& tr, int i, std::size_t k) {
  if (i < 1) throw ConfigError("ttc: vehicle index must be >= 1");
  const auto& ahead = tr.vehicles.at(static_cast<std::size_t>(i - 1));
  const auto& self = tr.vehicles.at(static_cast<std::size_t>(i));
  return ttc_value(ahead.p.at(k) - self.p.at(k) - tr.length, self.v.at(k) - ahead.v.at(k));
}

namespace {

template <class Fn>
void for_each_flagged(const SimulationTrace& tr, double ttc_star, Fn&& fn) {
  if (!(ttc_star > 0.0)) throw ConfigError("ttc_star must be > 0");
  for (std::size_t i = 1; i < tr.vehicles.size(); ++i) {
    for (std::size_t k = 0; k < tr.steps(); ++k) {
      const double x = ttc(tr, static_cast<int>(i), k);
      if (x > 0.0 && x <= ttc_star) fn(x);
    }
  }
}

}  // namespace

double tet(const SimulationTrace& tr, double ttc_star) {
  std::size_t count = 0;
  for_each_flagged(tr, ttc_star, [&](double) { ++count; });
  return static_cast<double>(count) * tr.dt;
}

double tit(const SimulationTrace& tr, double ttc_star) {
  double sum = 0.0;
  for_each_flagged(tr, ttc_star, [&](double x) { sum += 1.0 / x - 1.0 / ttc_star; });
  return sum * tr.dt;
}

// ---- energy / emissions -----------------------------------------------------

std::string to_string(MoeCategory c) {
  switch (c) {
    case MoeCategory::Fuel: return "fuel";
    case MoeCategory::HC: return "hc";
    case MoeCategory::CO: return "co";
    case MoeCategory::NOx: return "nox";
    case MoeCategory::CO2: return "co2";
  }
  return "?";
}

MoeCategory moe_category_from_string(const std::string& name) {
  std::string low = name;
  std::transform(low.begin(), low.end(), low.begin(), [](unsigned char ch) { return std::tolower(ch); });
  for (auto c : kMoeCategories) {
    if (to_string(c) == low) return c;
  }
  throw ConfigError("unknown MOE category '" + name + "'");
}

const VtMicroCategory& VtMicroCoefficients::at(MoeCategory c) const {
  auto it = categories.find(c);
  if (it == categories.end()) throw ConfigError("vt-micro: missing category '" + to_string(c) + "'");
  return it->second;
}

namespace {

double speed_scale_for(const std::string& unit) {
  if (unit == "m/s") return 1.0;
  if (unit == "km/h") return 3.6;
  if (unit == "mph") return 3.6 / 1.609344;
  throw ConfigError("vt-micro: unsupported speed unit '" + unit + "'");
}

double accel_scale_for(const std::string& unit) {
  if (unit == "m/s^2" || unit == "m/s2") return 1.0;
  if (unit == "km/h/s") return 3.6;
  if (unit == "mph/s") return 3.6 / 1.609344;
  throw ConfigError("vt-micro: unsupported acceleration unit '" + unit + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

VtMicroCoefficients VtMicroCoefficients::uniform(const Matrix4& e, const std::string& speed_unit,
                                                 const std::string& accel_unit) {
  VtMicroCoefficients c;
  c.speed_unit = speed_unit;
  c.accel_unit = accel_unit;
  c.speed_scale = speed_scale_for(speed_unit);
  c.accel_scale = accel_scale_for(accel_unit);
  for (auto cat : kMoeCategories) c.categories[cat] = {"", e, e};
  return c;
}

VtMicroCoefficients parse_vt_micro(const std::string& text, const std::string& origin) {
  VtMicroCoefficients out;
  std::optional<std::string> speed_unit, accel_unit;
  // Bits 0-3 positive rows, 4-7 negative rows.
  std::map<MoeCategory, unsigned> filled;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;

  auto fail = [&](const std::string& what) -> ConfigError {
    return ConfigError(origin + ":" + std::to_string(lineno) + ": " + what);
  };

  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      std::transform(section.begin(), section.end(), section.begin(),
                     [](unsigned char ch) { return std::tolower(ch); });
      if (section != "units") {
        try {
          filled.emplace(moe_category_from_string(section), 0u);
        } catch (const ConfigError&) {
          throw fail("unknown section [" + section + "]");
        }
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw fail("key '" + key + "' outside any section");

    if (section == "units") {
      if (key == "speed") {
        speed_unit = value;
      } else if (key == "acceleration") {
        accel_unit = value;
      } else {
        throw fail("unknown units key '" + key + "'");
      }
      continue;
    }

    const MoeCategory cat = moe_category_from_string(section);
    VtMicroCategory& entry = out.categories[cat];
    if (key == "unit") {
      entry.unit = value;
      continue;
    }
    std::string regime = "both";
    std::string row_key = key;
    if (const auto dot = key.find('.'); dot != std::string::npos) {
      regime = key.substr(0, dot);
      row_key = key.substr(dot + 1);
      if (regime != "positive" && regime != "negative") throw fail("unknown regime '" + regime + "'");
    }
    if (row_key.size() != 4 || row_key.compare(0, 3, "row") != 0 || row_key[3] < '0' ||
        row_key[3] > '3') {
      throw fail("unknown key '" + key + "' in [" + section + "]");
    }
    const int row = row_key[3] - '0';
    std::array<double, 4> vals{};
    std::istringstream ss(value);
    for (auto& x : vals) {
      if (!(ss >> x)) throw fail("row '" + key + "' needs 4 numbers");
    }
    std::string extra;
    if (ss >> extra) throw fail("row '" + key + "' has more than 4 numbers");
    if (regime != "negative") {
      entry.positive[row] = vals;
      filled[cat] |= 1u << row;
    }
    if (regime != "positive") {
      entry.negative[row] = vals;
      filled[cat] |= 1u << (row + 4);
    }
  }

  if (!speed_unit || !accel_unit) {
    throw ConfigError(origin + ": [units] block with speed and acceleration is mandatory");
  }
  out.speed_unit = *speed_unit;
  out.accel_unit = *accel_unit;
  out.speed_scale = speed_scale_for(out.speed_unit);
  out.accel_scale = accel_scale_for(out.accel_unit);
  for (auto cat : kMoeCategories) {
    auto it = filled.find(cat);
    if (it == filled.end()) throw ConfigError(origin + ": missing category [" + to_string(cat) + "]");
    if (it->second != 0xFFu) {
      throw ConfigError(origin + ": category [" + to_string(cat) + "] is not fully populated");
    }
  }
  return out;
}

VtMicroCoefficients load_vt_micro(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open coefficient file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_vt_micro(ss.str(), path);
}

double vt_micro_log_rate(const VtMicroCoefficients& c, MoeCategory cat, double v, double a) {
  const VtMicroCategory& e = c.at(cat);
  const double vs = v * c.speed_scale;
  const double as = a * c.accel_scale;
  const Matrix4& m = as >= 0.0 ? e.positive : e.negative;
  double sum = 0.0;
  double vp = 1.0;
  for (int c1 = 0; c1 < 4; ++c1) {
    double ap = 1.0;
    for (int c2 = 0; c2 < 4; ++c2) {
      sum += m[c1][c2] * vp * ap;
      ap *= as;
    }
    vp *= vs;
  }
  return sum;
}

VtMicroTotal vt_micro(const SimulationTrace& tr, const VtMicroCoefficients& c, MoeCategory cat,
                      int first, int last, std::size_t begin, std::size_t end) {
  require_trace(tr);
  c.at(cat);
  if (last < 0) last = tr.platoon_size();
  // Left Riemann sum over the steps() - 1 intervals of the trace.
  end = std::min(end, tr.steps() - 1);
  if (first < 1 || last > tr.platoon_size() || first > last + 1 || begin > end) {
    throw ConfigError("vt_micro: vehicle or step range out of bounds");
  }
  static const double kMaxLog = std::log(std::numeric_limits<double>::max());
  VtMicroTotal out;
  for (int i = first; i <= last; ++i) {
    const auto& vs = tr.vehicles[static_cast<std::size_t>(i)];
    for (std::size_t k = begin; k < end; ++k) {
      const double lr = vt_micro_log_rate(c, cat, vs.v[k], vs.a[k]);
      if (!std::isfinite(lr) || lr > kMaxLog) {
        ++out.overflow_samples;
        continue;
      }
      out.total += std::exp(lr) * tr.dt;
    }
  }
  return out;
}

// ---- summary ----------------------------------------------------------------

MoeSummary summarize(const SimulationTrace& tr, const VtMicroCoefficients* coeffs,
                     const MoeOptions& opt) {
  MoeSummary s;
  const double x = opt.station_x ? *opt.station_x : default_station(tr, opt.station_fraction);
  s.outflow = traffic_outflow(tr, x, opt.reference);
  s.dampening_ratio = dampening_ratio(tr);
  if (coeffs) {
    for (auto cat : kMoeCategories) {
      const VtMicroTotal t = vt_micro(tr, *coeffs, cat);
      s.emissions[cat] = t.total;
      s.overflow_samples += t.overflow_samples;
    }
  }
  s.tet = tet(tr, opt.ttc_star);
  s.tit = tit(tr, opt.ttc_star);
  s.max_jerk = max_jerk(tr);
  return s;
}

}  // namespace platoon
