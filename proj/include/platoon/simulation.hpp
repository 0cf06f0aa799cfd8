#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "platoon/controllers.hpp"
#include "platoon/history.hpp"
#include "platoon/scenario.hpp"
#include "platoon/vehicle.hpp"

namespace platoon {

enum class PlatoonKind { CS, CTG, Hybrid };
enum class LeaderKind { CAV, AvHdv };

/// One platoon. For Hybrid and CTG, `ctg` drives vehicle 1 against the
/// vehicle ahead of the platoon; CTG followers use the same gains with time
/// gap `h_follower` and `r` predecessors. CS and Hybrid followers use `cs`.
/// The compensation delays `ctg.g` and `cs.g` are replaced by
/// compensation_delay(vehicle) when the platoon is simulated.
struct PlatoonConfig {
  PlatoonKind kind = PlatoonKind::Hybrid;
  int n = 5;
  int r = 2;
  CtgParams ctg;
  double h_follower = 0.262;
  CsParams cs;
  VehicleParams vehicle;
  LeaderKind exogenous_leader = LeaderKind::CAV;
  bool operator==(const PlatoonConfig&) const = default;

  void validate() const;
  /// Copy with both compensation delays set from the vehicle parameters.
  PlatoonConfig effective() const;

  static PlatoonConfig hybrid(int n);
  static PlatoonConfig cs_platoon(int n);
  static PlatoonConfig ctg_platoon(int n, int r);
};

std::string to_string(PlatoonKind kind);
PlatoonKind platoon_kind_from_string(const std::string& name);
std::string to_string(LeaderKind kind);
LeaderKind leader_kind_from_string(const std::string& name);

/// Front-to-front distance from the vehicle ahead at constant speed v0 for
/// the policy this vehicle follows (includes the g*v0 compensation term).
double equilibrium_gap(const PlatoonConfig& cfg, int index_in_platoon, double v0);

struct VehicleSeries {
  std::vector<double> p, v, a, u, ds;
};

struct CollisionEvent {
  int vehicle = 0;
  std::size_t step = 0;
  double t = 0.0;
  double gap = 0.0;
};

/// Vehicle 0 is the exogenous leader; 1..n are platoon members (all
/// platoons chained in order for multi-platoon runs).
struct SimulationTrace {
  double dt = 0.1;
  double duration = 0.0;
  double length = 5.0;
  std::vector<double> t;
  std::vector<VehicleSeries> vehicles;
  std::vector<int> platoon_starts;  // global index of each platoon's vehicle 1
  bool collision = false;
  std::vector<CollisionEvent> collisions;  // first event per vehicle

  std::size_t steps() const noexcept { return t.size(); }
  int platoon_size() const noexcept { return static_cast<int>(vehicles.size()) - 1; }
};

struct RunOptions {
  double dt = 0.1;
  double position_offset = 0.0;
  bool reverse_evaluation = false;  // evaluate controllers from the tail forward
};

/// Equilibrium start: every vehicle at v0 with zero acceleration, each
/// history pre-filled back far enough for the longest delayed lookup.
struct InitialCondition {
  std::vector<VehicleState> states;
  std::vector<StateHistory> histories;
  std::vector<int> platoon_starts;
};

InitialCondition initialize_platoon(std::span<const PlatoonConfig> cfgs, const Scenario& s,
                                    const RunOptions& opt);
InitialCondition initialize_platoon(const PlatoonConfig& cfg, const Scenario& s,
                                    double dt = 0.1);

SimulationTrace run(const PlatoonConfig& cfg, const Scenario& s, double dt = 0.1);
SimulationTrace run(const PlatoonConfig& cfg, const Scenario& s, const RunOptions& opt);
SimulationTrace run_multi(std::span<const PlatoonConfig> cfgs, const Scenario& s,
                          double dt = 0.1);
SimulationTrace run_multi(std::span<const PlatoonConfig> cfgs, const Scenario& s,
                          const RunOptions& opt);

}  // namespace platoon
