#include "platoon/controllers.hpp"

#include <algorithm>
#include <string>

#include "platoon/errors.hpp"

namespace platoon {

double ctg_target_spacing(double v_self, const StateHistory& leader, double t,
                          const CtgParams& p, double d) {
  return v_self * p.h + leader.speed_integral(t - p.g, t) + d;
}

double ctg_spacing_error(const VehicleState& self, const StateHistory& leader, double t,
                         const CtgParams& p, double length, double d) {
  const VehicleState lead = leader.lookup(t - p.g);
  return lead.p - self.p - length - self.v * p.h - d;
}

CtgChannels ctg_channels(const VehicleState& self, const StateHistory& leader, double t,
                         const CtgParams& p, double length, double d,
                         bool leader_accel_available) {
  const VehicleState lead = leader.lookup(t - p.g);
  CtgChannels c;
  c.spacing = lead.p - self.p - length - self.v * p.h - d;
  c.speed = lead.v - self.v;
  c.accel = leader_accel_available ? lead.a - self.a : 0.0;
  return c;
}

double ctg_control(const VehicleState& self, const StateHistory& leader, double t,
                   const CtgParams& p, double length, double d, bool leader_accel_available) {
  const CtgChannels c = ctg_channels(self, leader, t, p, length, d, leader_accel_available);
  return p.k_s * c.spacing + p.k_v * c.speed + p.k_a * c.accel;
}

double ctg_follower_control(const VehicleState& self,
                            std::span<const StateHistory* const> predecessors, double t,
                            const CtgParams& p, double length, double d, int r) {
  if (r < 1) throw ConfigError("ctg_follower_control: r must be >= 1, got " + std::to_string(r));
  const auto used = std::min<std::size_t>(static_cast<std::size_t>(r), predecessors.size());
  if (used == 0) throw ConfigError("ctg_follower_control: no predecessor available");

  double sum = 0.0;
  for (std::size_t k = 0; k < used; ++k) {
    const double j = static_cast<double>(k + 1);
    const VehicleState pred = predecessors[k]->lookup(t - p.g);
    const double desired = j * (length + d) + (j * p.h + (j - 1.0) * p.g) * self.v;
    sum += p.k_s * (pred.p - self.p - desired) + p.k_v * (pred.v - self.v) +
           p.k_a * (pred.a - self.a);
  }
  return sum / static_cast<double>(used);
}

double cs_target_spacing(const StateHistory& pred, double t, const CsParams& p, double d) {
  return d + pred.speed_integral(t - p.g, t);
}

double cs_spacing_error(const VehicleState& self, const StateHistory& pred, double t,
                        const CsParams& p, double length, double d) {
  return pred.lookup(t - p.g).p - self.p - length - d;
}

double cs_leader_spacing_error(const VehicleState& self, const StateHistory& leader, double t,
                               const CsParams& p, double length, double d, int index_i) {
  if (index_i < 2) {
    throw ConfigError("cs_leader_spacing_error: index_i must be >= 2, got " +
                      std::to_string(index_i));
  }
  const double gaps = static_cast<double>(index_i - 1);
  return leader.lookup(t - p.sigma(index_i)).p - self.p - gaps * (length + d);
}

CsChannels cs_channels(const VehicleState& self, const StateHistory& pred,
                       const StateHistory& leader, double t, const CsParams& p, double length,
                       double d, int index_i, bool accel_available) {
  if (index_i < 2) {
    throw ConfigError("cs_channels: index_i must be >= 2, got " + std::to_string(index_i));
  }
  const VehicleState pr = pred.lookup(t - p.g);
  const VehicleState ld = leader.lookup(t - p.sigma(index_i));
  const double gaps = static_cast<double>(index_i - 1);

  CsChannels c;
  c.pred_accel = accel_available ? pr.a : 0.0;
  c.leader_accel = accel_available ? ld.a : 0.0;
  c.pred_speed = pr.v - self.v;
  c.pred_spacing = pr.p - self.p - length - d;
  c.leader_speed = ld.v - self.v;
  c.leader_spacing = ld.p - self.p - gaps * (length + d);
  return c;
}

double cs_combine(const CsChannels& c, const CsParams& p) {
  const double denom = 1.0 + p.q3;
  if (denom == 0.0) throw DegenerateGainError("cs_control: 1 + q3 must be non-zero");
  const double num = c.pred_accel + p.q3 * c.leader_accel + (p.q1 + p.lambda) * c.pred_speed +
                     p.q1 * p.lambda * c.pred_spacing + (p.q4 + p.lambda * p.q3) * c.leader_speed +
                     p.lambda * p.q4 * c.leader_spacing;
  return num / denom;
}

double cs_control(const VehicleState& self, const StateHistory& pred, const StateHistory& leader,
                  double t, const CsParams& p, double length, double d, int index_i,
                  bool accel_available) {
  return cs_combine(cs_channels(self, pred, leader, t, p, length, d, index_i, accel_available), p);
}

}  // namespace platoon
