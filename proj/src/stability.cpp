#include "platoon/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "platoon/errors.hpp"
#include "platoon/parallel.hpp"

namespace platoon {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LocalStability from_residuals(std::vector<double> r) {
  LocalStability out;
  out.stable = std::all_of(r.begin(), r.end(), [](double x) { return x > 0.0; });
  out.residuals = std::move(r);
  return out;
}

void require_grid(std::span<const double> grid) {
  for (double w : grid) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw ConfigError("frequency grid must lie in (0, inf)");
    }
  }
}

double relative_slack(double value, double bound) {
  return (bound - value) / std::max(1.0, std::abs(bound));
}

}  // namespace

LocalStability local_stability_cs(const CsParams& p, double phi) {
  const double s = p.q1 + p.q4;
  return from_residuals({
      1.0 + p.q3,
      s * p.lambda,
      p.lambda * (1.0 + p.q3) - (p.lambda * phi - 1.0) * s,
  });
}

LocalStability local_stability_ctg(const CtgParams& p, double phi) {
  const double kp = p.k_s;
  return from_residuals({
      1.0 + p.k_a,
      kp,
      p.k_v + p.h * kp,
      (1.0 + p.k_a) * (p.k_v + p.h * kp) - phi * kp,
  });
}

TransferBlocks eval_blocks(cplx z, const CtgParams& ctg, const CsParams& cs, double phi) {
  if (z == cplx(0.0, 0.0)) throw SingularFrequencyError("eval_blocks: z = 0 is singular");
  const double kp = ctg.k_s;
  const cplx z2 = z * z;
  const cplx z3 = z2 * z;
  TransferBlocks b;
  b.G = 1.0 / (z2 + z3 * phi);
  b.K = ctg.k_a * z2 + ctg.k_v * z + kp;
  b.F = kp * z;
  b.A = (1.0 + cs.q3) * z2 * (1.0 + z * phi) +
        (cs.q1 + cs.lambda + cs.q4 + cs.q3 * cs.lambda) * z + (cs.q1 + cs.q4) * cs.lambda;
  b.B = z2 + (cs.q1 + cs.lambda) * z + cs.q1 * cs.lambda;
  b.C = cs.q3 * z2 + (cs.q4 + cs.q3 * cs.lambda) * z + cs.q4 * cs.lambda;
  return b;
}

std::vector<double> log_grid(double w_min, double w_max, int points) {
  if (!(w_min > 0.0) || !(w_max >= w_min) || points < 1) {
    throw ConfigError("log_grid: need 0 < w_min <= w_max and points >= 1");
  }
  std::vector<double> w(static_cast<std::size_t>(points));
  if (points == 1) {
    w[0] = w_min;
    return w;
  }
  const double lo = std::log10(w_min);
  const double hi = std::log10(w_max);
  for (int k = 0; k < points; ++k) {
    w[static_cast<std::size_t>(k)] = std::pow(10.0, lo + (hi - lo) * k / (points - 1));
  }
  return w;
}

CurveCheck string_spacing_condition(const CsParams& cs, double phi, std::span<const double> grid) {
  require_grid(grid);
  const CtgParams unused{};
  CurveCheck out;
  out.values.reserve(grid.size());
  out.verdict = true;
  out.worst_margin = kInf;
  for (double w : grid) {
    const TransferBlocks b = eval_blocks(cplx(0.0, w), unused, cs, phi);
    const double den = std::abs(b.A);
    if (den < kSingularFloor) {
      out.values.push_back(kInf);
      out.singular.push_back(w);
      out.failing.push_back(w);
      out.verdict = false;
      continue;
    }
    const double m = std::abs(b.B) / den;
    out.values.push_back(m);
    const double slack = relative_slack(m, 1.0);
    out.worst_margin = std::min(out.worst_margin, slack);
    if (m > 1.0 + kStabilityTol) {
      out.verdict = false;
      out.failing.push_back(w);
    }
  }
  out.marginal = std::abs(out.worst_margin) <= kMarginalBand;
  return out;
}

ExHeadToTailCheck ex_head_to_tail_condition(const CtgParams& ctg, const CsParams& cs, double phi,
                                            std::span<const double> grid) {
  require_grid(grid);
  ExHeadToTailCheck out;
  out.verdict = true;
  out.worst_margin = kInf;
  for (double w : grid) {
    const TransferBlocks b = eval_blocks(cplx(0.0, w), ctg, cs, phi);
    const cplx gk = b.G * b.K;
    const cplx closed = 1.0 + gk + b.G * b.F * ctg.h;

    const double abs_a = std::abs(b.A);
    const double abs_b = std::abs(b.B);
    const double right = abs_a > abs_b ? std::max(std::abs(b.C) / (abs_a - abs_b), 1.0) : kInf;
    out.right.push_back(right);

    if (std::abs(gk) < kSingularFloor) {
      out.left.push_back(kInf);
      out.leader_ratio.push_back(0.0);
      out.singular.push_back(w);
      out.failing.push_back(w);
      out.verdict = false;
      continue;
    }
    const double left = std::abs(closed / gk);
    out.left.push_back(left);
    out.leader_ratio.push_back(std::abs(gk) / std::abs(closed));

    if (!std::isfinite(right)) {
      out.failing.push_back(w);
      out.verdict = false;
      out.worst_margin = -kInf;
      continue;
    }
    // Slack of left >= right, relative to right.
    const double slack = (left - right) / std::max(1.0, right);
    out.worst_margin = std::min(out.worst_margin, slack);
    if (left < right * (1.0 - kStabilityTol)) {
      out.failing.push_back(w);
      out.verdict = false;
    }
  }
  out.marginal = std::isfinite(out.worst_margin) && std::abs(out.worst_margin) <= kMarginalBand;
  return out;
}

HeadToTailCurve head_to_tail_norm(const CtgParams& ctg, const CsParams& cs, double phi, int n,
                                  std::span<const double> grid) {
  if (n < 2) throw ConfigError("head_to_tail_norm: platoon size must be >= 2");
  require_grid(grid);
  HeadToTailCurve out;
  out.n = n;
  out.min = kInf;
  out.max = -kInf;
  for (double w : grid) {
    const TransferBlocks b = eval_blocks(cplx(0.0, w), ctg, cs, phi);
    const cplx diff = b.A - b.B;
    if (std::abs(diff) < kSingularFloor || std::abs(b.A) < kSingularFloor) {
      out.values.push_back(kInf);
      out.singular.push_back(w);
      continue;
    }
    const cplx ratio_pow = std::pow(b.B / b.A, n - 1);
    const double m = std::abs(ratio_pow + b.C / diff * (1.0 - ratio_pow));
    out.values.push_back(m);
    out.min = std::min(out.min, m);
    out.max = std::max(out.max, m);
  }
  return out;
}

StabilityReport hybrid_verdict(const CtgParams& ctg, const CsParams& cs, double phi,
                               const GridOptions& opts, int platoon_size) {
  const std::vector<double> coarse = log_grid(opts.w_min, opts.w_max, opts.points);

  // Pass 1: locate intervals where either pointwise test flips.
  std::set<double> refined(coarse.begin(), coarse.end());
  if (opts.refine_points > 0 && coarse.size() > 1) {
    const CurveCheck s = string_spacing_condition(cs, phi, coarse);
    const ExHeadToTailCheck e = ex_head_to_tail_condition(ctg, cs, phi, coarse);
    auto pass14 = [&](std::size_t k) { return s.values[k] <= 1.0 + kStabilityTol; };
    auto pass18 = [&](std::size_t k) {
      return std::isfinite(e.right[k]) && std::isfinite(e.left[k]) &&
             e.left[k] >= e.right[k] * (1.0 - kStabilityTol);
    };
    for (std::size_t k = 0; k + 1 < coarse.size(); ++k) {
      if (pass14(k) != pass14(k + 1) || pass18(k) != pass18(k + 1)) {
        const double lo = coarse[k];
        const double hi = coarse[k + 1];
        for (int j = 1; j <= opts.refine_points; ++j) {
          refined.insert(lo + (hi - lo) * j / (opts.refine_points + 1));
        }
      }
    }
  }

  StabilityReport r;
  r.grid.assign(refined.begin(), refined.end());
  const CurveCheck s = string_spacing_condition(cs, phi, r.grid);
  const ExHeadToTailCheck e = ex_head_to_tail_condition(ctg, cs, phi, r.grid);
  r.eq14 = s.values;
  r.eq18_left = e.left;
  r.eq18_right = e.right;
  r.eq22 = e.leader_ratio;
  r.b3 = head_to_tail_norm(ctg, cs, phi, platoon_size, r.grid);

  r.local_cs = local_stability_cs(cs, phi);
  r.local_ctg = local_stability_ctg(ctg, phi);
  r.string_spacing = s.verdict;
  r.ex_head_to_tail = e.verdict;
  r.hybrid = r.string_spacing && r.ex_head_to_tail;
  r.head_to_tail = r.b3.singular.empty() && r.b3.max <= 1.0 + kStabilityTol;
  r.string_spacing_marginal = s.marginal;
  r.ex_head_to_tail_marginal = e.marginal;
  r.eq14_singular = s.singular;
  r.eq18_singular = e.singular;
  if (!r.string_spacing) r.failing_conditions.emplace_back("eq14");
  if (!r.ex_head_to_tail) r.failing_conditions.emplace_back("eq18");
  return r;
}

// ---- feasibility scan ------------------------------------------------------

namespace {

double* param_slot(StabilityParams& p, const std::string& name) {
  if (name == "q1") return &p.cs.q1;
  if (name == "q3") return &p.cs.q3;
  if (name == "q4") return &p.cs.q4;
  if (name == "lambda") return &p.cs.lambda;
  if (name == "k_s") return &p.ctg.k_s;
  if (name == "k_v") return &p.ctg.k_v;
  if (name == "k_a") return &p.ctg.k_a;
  if (name == "h") return &p.ctg.h;
  if (name == "phi") return &p.phi;
  throw ConfigError("unknown stability parameter '" + name +
                    "' (expected one of q1 q3 q4 lambda k_s k_v k_a h phi)");
}

}  // namespace

void set_stability_param(StabilityParams& params, const std::string& name, double value) {
  *param_slot(params, name) = value;
}

double get_stability_param(const StabilityParams& params, const std::string& name) {
  auto copy = params;
  return *param_slot(copy, name);
}

std::vector<double> ScanAxis::values() const {
  if (!std::isfinite(min) || !std::isfinite(max) || min > max) {
    throw ConfigError("scan axis '" + name + "': need finite min <= max");
  }
  if (min == max) return {min};
  if (resolution < 2) throw ConfigError("scan axis '" + name + "': resolution must be >= 2");
  std::vector<double> v(static_cast<std::size_t>(resolution));
  for (int k = 0; k < resolution; ++k) {
    v[static_cast<std::size_t>(k)] = min + (max - min) * k / (resolution - 1);
  }
  return v;
}

ScanResult feasibility_scan(const ScanAxis& x, const ScanAxis& y, const StabilityParams& fixed,
                            const GridOptions& grid, int jobs) {
  StabilityParams probe = fixed;
  param_slot(probe, x.name);
  param_slot(probe, y.name);

  ScanResult out;
  out.x_name = x.name;
  out.y_name = y.name;
  out.xs = x.values();
  out.ys = y.values();
  const std::size_t nx = out.xs.size();
  std::vector<char> cells(nx * out.ys.size(), 0);
  parallel_for(cells.size(), jobs, [&](std::size_t idx) {
    StabilityParams p = fixed;
    set_stability_param(p, x.name, out.xs[idx % nx]);
    set_stability_param(p, y.name, out.ys[idx / nx]);
    cells[idx] = hybrid_verdict(p.ctg, p.cs, p.phi, grid).hybrid ? 1 : 0;
  });
  out.hybrid.assign(out.ys.size(), std::vector<bool>(nx, false));
  for (std::size_t idx = 0; idx < cells.size(); ++idx) {
    out.hybrid[idx / nx][idx % nx] = cells[idx] != 0;
  }
  return out;
}

}  // namespace platoon
