#include "platoon/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "platoon/errors.hpp"

namespace platoon {

void VehicleParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("vehicle parameter out of range: ") + what);
  };
  require(std::isfinite(phi) && phi > 0.0, "phi must be > 0");
  require(std::isfinite(length) && length > 0.0, "length must be > 0");
  require(std::isfinite(standstill) && standstill >= 0.0, "standstill must be >= 0");
  require(std::isfinite(sensor_delay) && sensor_delay >= 0.0, "sensor_delay must be >= 0");
  require(std::isfinite(comm_delay) && comm_delay >= 0.0, "comm_delay must be >= 0");
  require(std::isfinite(leader_delay_per_hop) && leader_delay_per_hop >= 0.0,
          "leader_delay_per_hop must be >= 0");
}

bool is_finite(const VehicleState& s) {
  return std::isfinite(s.p) && std::isfinite(s.v) && std::isfinite(s.a);
}

VehicleState step_dynamics(const VehicleState& state, double u, double phi, double dt) {
  if (!is_finite(state) || !std::isfinite(u) || !std::isfinite(phi) || !std::isfinite(dt)) {
    std::ostringstream msg;
    msg << "step_dynamics: non-finite input (p=" << state.p << ", v=" << state.v
        << ", a=" << state.a << ", u=" << u << ", phi=" << phi << ", dt=" << dt << ")";
    throw NumericError(msg.str());
  }
  if (dt <= 0.0) throw NumericError("step_dynamics: dt must be > 0");
  if (phi <= 0.0) throw NumericError("step_dynamics: phi must be > 0");

  return VehicleState{
      state.p + dt * state.v,
      state.v + dt * state.a,
      state.a + dt * (u - state.a) / phi,
  };
}

double compensation_delay(const VehicleParams& params) {
  // theta_{1,i} - theta_{1,i-1} is the same for every i under the linear model.
  return std::max({params.sensor_delay, params.comm_delay, params.leader_delay_per_hop});
}

}  // namespace platoon
