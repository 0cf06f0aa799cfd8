#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "platoon/controllers.hpp"

namespace platoon {

using cplx = std::complex<double>;

/// Comparison tolerance (relative) for every <= / >= test on a magnitude curve.
inline constexpr double kStabilityTol = 1e-9;
/// Margins smaller than this (relative) mark a verdict as marginal.
inline constexpr double kMarginalBand = 1e-6;
/// Magnitudes below this are treated as zero (singular frequency).
inline constexpr double kSingularFloor = 1e-15;

struct LocalStability {
  std::vector<double> residuals;  // each must be > 0
  bool stable = false;
};

/// Residuals 1+q3, (q1+q4)*lambda, lambda*(1+q3) - (lambda*phi - 1)*(q1+q4).
LocalStability local_stability_cs(const CsParams& p, double phi);

/// Residuals 1+k_a, k_p, k_v + h*k_p, (1+k_a)(k_v + h*k_p) - phi*k_p with k_p = k_s.
LocalStability local_stability_ctg(const CtgParams& p, double phi);

/// Laplace-domain blocks of the leader loop (G, K, F) and the follower
/// position recursion A p_i = B p_{i-1} e^{-gz} + C p_1 e^{-sigma z}.
struct TransferBlocks {
  cplx G, K, F;
  cplx A, B, C;
};

/// Throws SingularFrequencyError for z == 0.
TransferBlocks eval_blocks(cplx z, const CtgParams& ctg, const CsParams& cs, double phi);

struct GridOptions {
  double w_min = 1e-3;
  double w_max = 1e3;
  int points = 2000;
  int refine_points = 200;
  bool operator==(const GridOptions&) const = default;
};

std::vector<double> log_grid(double w_min, double w_max, int points);

struct CurveCheck {
  std::vector<double> values;
  bool verdict = false;
  bool marginal = false;
  double worst_margin = 0.0;  // most negative (or smallest) relative slack
  std::vector<double> singular;  // frequencies where the curve is undefined
  std::vector<double> failing;   // frequencies where the pointwise test fails
};

/// |B/A| <= 1 at every grid frequency.
CurveCheck string_spacing_condition(const CsParams& cs, double phi, std::span<const double> grid);

struct ExHeadToTailCheck {
  std::vector<double> left;   // |(1 + GK + GFh) / GK|
  std::vector<double> right;  // max(|C| / (|A| - |B|), 1); +inf when |A| <= |B|
  std::vector<double> leader_ratio;  // |GK / (1 + GK + GFh)|
  bool verdict = false;
  bool marginal = false;
  double worst_margin = 0.0;
  std::vector<double> singular;
  std::vector<double> failing;
};

ExHeadToTailCheck ex_head_to_tail_condition(const CtgParams& ctg, const CsParams& cs, double phi,
                                            std::span<const double> grid);

struct HeadToTailCurve {
  int n = 0;
  std::vector<double> values;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> singular;
};

/// |(B/A)^{n-1} + C/(A-B) (1 - (B/A)^{n-1})| per frequency.
HeadToTailCurve head_to_tail_norm(const CtgParams& ctg, const CsParams& cs, double phi, int n,
                                  std::span<const double> grid);

struct StabilityReport {
  std::vector<double> grid;
  std::vector<double> eq14;
  std::vector<double> eq18_left;
  std::vector<double> eq18_right;
  std::vector<double> eq22;
  HeadToTailCurve b3;

  LocalStability local_cs;
  LocalStability local_ctg;
  bool string_spacing = false;
  bool ex_head_to_tail = false;
  bool hybrid = false;
  bool head_to_tail = false;  // sup of the B3 curve <= 1

  bool string_spacing_marginal = false;
  bool ex_head_to_tail_marginal = false;
  std::vector<double> eq14_singular;
  std::vector<double> eq18_singular;
  std::vector<std::string> failing_conditions;  // subset of {"eq14", "eq18"}
};

/// Evaluates every condition on a log grid, then adds `refine_points` linear
/// samples inside each interval where a pointwise test flips, and re-evaluates.
StabilityReport hybrid_verdict(const CtgParams& ctg, const CsParams& cs, double phi,
                               const GridOptions& grid = {}, int platoon_size = 5);

// ---- feasibility scan ------------------------------------------------------

struct StabilityParams {
  CtgParams ctg;
  CsParams cs;
  double phi = 0.5;
  bool operator==(const StabilityParams&) const = default;
};

/// Settable parameter names: q1 q3 q4 lambda k_s k_v k_a h phi.
void set_stability_param(StabilityParams& params, const std::string& name, double value);
double get_stability_param(const StabilityParams& params, const std::string& name);

struct ScanAxis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  int resolution = 2;
  bool operator==(const ScanAxis&) const = default;

  /// min == max collapses the axis to one value.
  std::vector<double> values() const;
};

struct ScanResult {
  std::string x_name, y_name;
  std::vector<double> xs, ys;
  std::vector<std::vector<bool>> hybrid;  // [iy][ix]
};

ScanResult feasibility_scan(const ScanAxis& x, const ScanAxis& y, const StabilityParams& fixed,
                            const GridOptions& grid = {}, int jobs = 1);

}  // namespace platoon
