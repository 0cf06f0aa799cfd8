#pragma once

namespace platoon {

/// Longitudinal state of one vehicle: front-bumper position (m), speed (m/s)
/// and realized acceleration (m/s^2).
struct VehicleState {
  double p = 0.0;
  double v = 0.0;
  double a = 0.0;

  bool operator==(const VehicleState&) const = default;
};

/// Physical and communication parameters shared by every platoon member.
/// The delay to the platoon leader grows linearly along the string:
/// theta_{1,i} = leader_delay_per_hop * i.
struct VehicleParams {
  double phi = 0.5;             // actuation lag (s)
  double length = 5.0;          // L (m)
  double standstill = 5.0;      // d (m)
  double sensor_delay = 0.02;   // delta (s)
  double comm_delay = 0.1;      // theta (s)
  double leader_delay_per_hop = 0.1;
  bool operator==(const VehicleParams&) const = default;

  void validate() const;
};

/// One explicit-Euler step of the third-order lag model. All right-hand
/// sides use the state before the update.
VehicleState step_dynamics(const VehicleState& state, double u, double phi, double dt);

/// Compensation delay g = max(delta, theta, delta_theta_{1,i}).
double compensation_delay(const VehicleParams& params);

bool is_finite(const VehicleState& s);

}  // namespace platoon
