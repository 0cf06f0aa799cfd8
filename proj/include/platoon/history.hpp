#pragma once

#include <cstddef>
#include <vector>

#include "platoon/vehicle.hpp"

namespace platoon {

/// Uniformly sampled record of one vehicle's past states. Delayed terms such
/// as p(t - g) or a(t - sigma) are answered by linear interpolation between
/// bracketing samples; times before the first sample clamp to it.
class StateHistory {
 public:
  StateHistory(double dt, double t0);
  StateHistory(double dt, double t0, std::vector<VehicleState> samples);

  void append(const VehicleState& s);

  VehicleState lookup(double t) const;

  /// Exact integral of the piecewise-linear speed signal over [t_a, t_b].
  double speed_integral(double t_a, double t_b) const;

  double dt() const noexcept { return dt_; }
  double t0() const noexcept { return t0_; }
  double latest_time() const;
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const VehicleState& back() const { return samples_.back(); }
  const VehicleState& operator[](std::size_t k) const { return samples_[k]; }
  const std::vector<VehicleState>& samples() const noexcept { return samples_; }

 private:
  // Fractional sample index of time t, snapped onto the grid when within
  // rounding noise of a sample.
  double index_of(double t) const;
  double speed_at_index(double x) const;

  double dt_;
  double t0_;
  std::vector<VehicleState> samples_;
};

}  // namespace platoon
