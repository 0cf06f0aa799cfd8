#pragma once

#include <span>

#include "platoon/history.hpp"
#include "platoon/vehicle.hpp"

namespace platoon {

/// Gains of the delay-compensated constant-time-gap law. `k_s` multiplies the
/// spacing error (the same gain appears as k_p in the stability conditions).
struct CtgParams {
  double k_s = 0.1;
  double k_v = 0.7;
  double k_a = 0.84;
  double h = 1.4;   // time gap (s)
  double g = 0.1;   // compensation delay (s)
  bool operator==(const CtgParams&) const = default;
};

/// Gains of the delay-compensated constant-spacing law with
/// leader-predecessor-follower topology.
struct CsParams {
  double q1 = 0.4;
  double q3 = 0.9;
  double q4 = 0.6;
  double lambda = 0.1;
  double g = 0.1;  // compensation delay per hop (s)
  bool operator==(const CsParams&) const = default;

  /// Accumulated delay to the leader for the vehicle at position `index_i`
  /// (leader = 1): sigma_i = (index_i - 1) * g.
  double sigma(int index_i) const { return static_cast<double>(index_i - 1) * g; }
};

// ---- constant time gap -----------------------------------------------------

double ctg_target_spacing(double v_self, const StateHistory& leader, double t,
                          const CtgParams& p, double d);

double ctg_spacing_error(const VehicleState& self, const StateHistory& leader, double t,
                         const CtgParams& p, double length, double d);

/// The three error signals the CTG law feeds back, before gains.
struct CtgChannels {
  double spacing = 0.0;  // delta s_1
  double speed = 0.0;    // v_0(t-g) - v_1
  double accel = 0.0;    // a_0(t-g) - a_1, zero when not communicated
};

CtgChannels ctg_channels(const VehicleState& self, const StateHistory& leader, double t,
                         const CtgParams& p, double length, double d,
                         bool leader_accel_available = true);

double ctg_control(const VehicleState& self, const StateHistory& leader, double t,
                   const CtgParams& p, double length, double d,
                   bool leader_accel_available = true);

/// Multi-predecessor CTG follower used by the pure-CTG baseline. Predecessors
/// are ordered nearest first; only the first min(r, size) are used. The
/// desired distance to the j-th predecessor is
///   j*(L + d) + (j*h + (j-1)*g) * v_self,
/// i.e. the single-gap equilibrium replicated j times, corrected for the one
/// compensation delay g applied to every predecessor lookup. Channels are
/// averaged with weight 1/r_eff, so r = 1 is exactly `ctg_control`.
double ctg_follower_control(const VehicleState& self,
                            std::span<const StateHistory* const> predecessors, double t,
                            const CtgParams& p, double length, double d, int r);

// ---- constant spacing ------------------------------------------------------

double cs_target_spacing(const StateHistory& pred, double t, const CsParams& p, double d);

double cs_spacing_error(const VehicleState& self, const StateHistory& pred, double t,
                        const CsParams& p, double length, double d);

/// Spacing error to the leader. `index_i` counts the subject's position with
/// the leader as 1, so (index_i - 1) gaps separate them.
double cs_leader_spacing_error(const VehicleState& self, const StateHistory& leader, double t,
                               const CsParams& p, double length, double d, int index_i);

struct CsChannels {
  double pred_accel = 0.0;    // a_{i-1}(t-g)
  double leader_accel = 0.0;  // a_1(t-sigma)
  double pred_speed = 0.0;    // v_{i-1}(t-g) - v_i
  double pred_spacing = 0.0;  // delta s_i
  double leader_speed = 0.0;  // v_1(t-sigma) - v_i
  double leader_spacing = 0.0;  // delta s_{1,i}
};

CsChannels cs_channels(const VehicleState& self, const StateHistory& pred,
                       const StateHistory& leader, double t, const CsParams& p, double length,
                       double d, int index_i, bool accel_available = true);

/// Combines channels with the CS gains. Throws DegenerateGainError when
/// 1 + q3 == 0.
double cs_combine(const CsChannels& c, const CsParams& p);

double cs_control(const VehicleState& self, const StateHistory& pred, const StateHistory& leader,
                  double t, const CsParams& p, double length, double d, int index_i,
                  bool accel_available = true);

}  // namespace platoon
