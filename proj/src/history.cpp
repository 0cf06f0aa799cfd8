#include "platoon/history.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "platoon/errors.hpp"

namespace platoon {

namespace {
constexpr double kSnap = 1e-7;  // in units of samples
}

StateHistory::StateHistory(double dt, double t0) : dt_(dt), t0_(t0) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw NumericError("StateHistory: dt must be > 0");
  if (!std::isfinite(t0)) throw NumericError("StateHistory: t0 must be finite");
}

StateHistory::StateHistory(double dt, double t0, std::vector<VehicleState> samples)
    : StateHistory(dt, t0) {
  for (const auto& s : samples) append(s);
}

void StateHistory::append(const VehicleState& s) {
  if (!is_finite(s)) throw NumericError("StateHistory: refusing to store a non-finite state");
  samples_.push_back(s);
}

double StateHistory::latest_time() const {
  if (samples_.empty()) throw RangeError("StateHistory: empty history");
  return t0_ + static_cast<double>(samples_.size() - 1) * dt_;
}

double StateHistory::index_of(double t) const {
  double x = (t - t0_) / dt_;
  double nearest = std::round(x);
  if (std::abs(x - nearest) < kSnap) x = nearest;
  return x;
}

VehicleState StateHistory::lookup(double t) const {
  if (samples_.empty()) throw RangeError("StateHistory: lookup on empty history");
  if (!std::isfinite(t)) throw NumericError("StateHistory: non-finite lookup time");
  const double x = index_of(t);
  const double last = static_cast<double>(samples_.size() - 1);
  if (x > last) {
    std::ostringstream msg;
    msg << "StateHistory: lookahead to t=" << t << " beyond latest sample t=" << latest_time();
    throw LookaheadError(msg.str());
  }
  if (x <= 0.0) return samples_.front();

  const auto k = static_cast<std::size_t>(std::floor(x));
  const double w = x - static_cast<double>(k);
  if (w == 0.0) return samples_[k];
  const VehicleState& lo = samples_[k];
  const VehicleState& hi = samples_[k + 1];
  return VehicleState{
      lo.p + w * (hi.p - lo.p),
      lo.v + w * (hi.v - lo.v),
      lo.a + w * (hi.a - lo.a),
  };
}

double StateHistory::speed_at_index(double x) const {
  if (x <= 0.0) return samples_.front().v;
  const auto k = static_cast<std::size_t>(std::floor(x));
  const double w = x - static_cast<double>(k);
  if (w == 0.0) return samples_[k].v;
  return samples_[k].v + w * (samples_[k + 1].v - samples_[k].v);
}

double StateHistory::speed_integral(double t_a, double t_b) const {
  if (samples_.empty()) throw RangeError("StateHistory: integral on empty history");
  if (t_a > t_b) {
    std::ostringstream msg;
    msg << "StateHistory: speed_integral needs t_a <= t_b (got " << t_a << " > " << t_b << ")";
    throw ArgumentOrderError(msg.str());
  }
  if (t_a == t_b) return 0.0;

  double xa = index_of(t_a);
  const double xb = index_of(t_b);
  const double last = static_cast<double>(samples_.size() - 1);
  if (xb > last) {
    std::ostringstream msg;
    msg << "StateHistory: speed_integral upper limit t=" << t_b << " is in the future";
    throw LookaheadError(msg.str());
  }

  double total = 0.0;
  // Clamped region before the first sample: constant speed.
  if (xa < 0.0) {
    const double end = std::min(xb, 0.0);
    total += (end - xa) * samples_.front().v;
    xa = end;
  }
  while (xa < xb) {
    const double seg_end = std::min(std::floor(xa) + 1.0, xb);
    total += (seg_end - xa) * 0.5 * (speed_at_index(xa) + speed_at_index(seg_end));
    xa = seg_end;
  }
  return total * dt_;
}

}  // namespace platoon
