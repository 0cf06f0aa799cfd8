#include "platoon/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "platoon/errors.hpp"

namespace platoon {

void PlatoonConfig::validate() const {
  if (n < 2) throw ConfigError("platoon: n must be >= 2, got " + std::to_string(n));
  if (kind == PlatoonKind::CTG && r != 2 && r != 3) {
    throw ConfigError("platoon: r must be 2 or 3 for CTG, got " + std::to_string(r));
  }
  vehicle.validate();
  if (1.0 + cs.q3 == 0.0) throw DegenerateGainError("platoon: 1 + q3 must be non-zero");
  for (double x : {ctg.k_s, ctg.k_v, ctg.k_a, ctg.h, h_follower, cs.q1, cs.q3, cs.q4, cs.lambda}) {
    if (!std::isfinite(x)) throw ConfigError("platoon: gains must be finite");
  }
  if (ctg.h < 0.0 || h_follower < 0.0) throw ConfigError("platoon: time gaps must be >= 0");
}

PlatoonConfig PlatoonConfig::effective() const {
  PlatoonConfig c = *this;
  const double g = compensation_delay(vehicle);
  c.ctg.g = g;
  c.cs.g = g;
  return c;
}

PlatoonConfig PlatoonConfig::hybrid(int n) {
  PlatoonConfig c;
  c.kind = PlatoonKind::Hybrid;
  c.n = n;
  return c;
}

PlatoonConfig PlatoonConfig::cs_platoon(int n) {
  PlatoonConfig c;
  c.kind = PlatoonKind::CS;
  c.n = n;
  return c;
}

PlatoonConfig PlatoonConfig::ctg_platoon(int n, int r) {
  PlatoonConfig c;
  c.kind = PlatoonKind::CTG;
  c.n = n;
  c.r = r;
  c.ctg.k_v = 1.67;
  c.ctg.h = 0.594;
  c.h_follower = r == 3 ? 0.198 : 0.262;
  return c;
}

std::string to_string(PlatoonKind kind) {
  switch (kind) {
    case PlatoonKind::CS: return "CS";
    case PlatoonKind::CTG: return "CTG";
    case PlatoonKind::Hybrid: return "HYBRID";
  }
  return "?";
}

PlatoonKind platoon_kind_from_string(const std::string& name) {
  std::string up = name;
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "CS") return PlatoonKind::CS;
  if (up == "CTG") return PlatoonKind::CTG;
  if (up == "HYBRID") return PlatoonKind::Hybrid;
  throw ConfigError("unknown platoon kind '" + name + "' (expected CS, CTG or HYBRID)");
}

std::string to_string(LeaderKind kind) {
  return kind == LeaderKind::CAV ? "CAV" : "AV_HDV";
}

LeaderKind leader_kind_from_string(const std::string& name) {
  if (name == "CAV") return LeaderKind::CAV;
  if (name == "AV_HDV" || name == "AV/HDV") return LeaderKind::AvHdv;
  throw ConfigError("unknown exogenous leader kind '" + name + "' (expected CAV or AV_HDV)");
}

double equilibrium_gap(const PlatoonConfig& cfg, int index_in_platoon, double v0) {
  const double g = compensation_delay(cfg.vehicle);
  const double base = cfg.vehicle.length + cfg.vehicle.standstill;
  if (index_in_platoon == 1 && cfg.kind != PlatoonKind::CS) return base + (cfg.ctg.h + g) * v0;
  if (cfg.kind == PlatoonKind::CTG) return base + (cfg.h_follower + g) * v0;
  return base + g * v0;
}

namespace {

enum class Law { CtgLeader, CtgFollower, Cs };

struct Role {
  Law law = Law::Cs;
  const PlatoonConfig* cfg = nullptr;  // effective copy
  int pred = 0;
  int leader = 0;
  int index_i = 2;
  bool accel_available = true;
  std::vector<int> preds;  // CTG follower, nearest first
};

std::vector<Role> build_roles(const std::vector<PlatoonConfig>& eff,
                              std::vector<int>& platoon_starts) {
  std::vector<Role> roles(1);  // slot 0 unused: exogenous leader
  int start = 1;
  for (std::size_t k = 0; k < eff.size(); ++k) {
    const PlatoonConfig& c = eff[k];
    platoon_starts.push_back(start);
    const bool ahead_is_cav = k > 0 || c.exogenous_leader == LeaderKind::CAV;
    for (int m = 1; m <= c.n; ++m) {
      Role role;
      role.cfg = &c;
      const int gi = start + m - 1;
      role.pred = gi - 1;
      if (m == 1) {
        role.accel_available = ahead_is_cav;
        if (c.kind == PlatoonKind::CS) {
          role.law = Law::Cs;
          role.leader = gi - 1;
          role.index_i = 2;
        } else {
          role.law = Law::CtgLeader;
        }
      } else if (c.kind == PlatoonKind::CTG) {
        role.law = Law::CtgFollower;
        for (int j = 1; j <= c.r && gi - j >= start; ++j) role.preds.push_back(gi - j);
      } else {
        role.law = Law::Cs;
        role.leader = start;
        role.index_i = m;
      }
      roles.push_back(std::move(role));
    }
    start += c.n;
  }
  return roles;
}

double longest_delay(const std::vector<Role>& roles) {
  double longest = 0.0;
  for (std::size_t i = 1; i < roles.size(); ++i) {
    const Role& r = roles[i];
    longest = std::max(longest, r.cfg->ctg.g);
    if (r.law == Law::Cs) longest = std::max(longest, r.cfg->cs.sigma(r.index_i));
  }
  return longest;
}

std::vector<PlatoonConfig> effective_all(std::span<const PlatoonConfig> cfgs) {
  if (cfgs.empty()) throw ConfigError("run: at least one platoon is required");
  std::vector<PlatoonConfig> eff;
  eff.reserve(cfgs.size());
  for (const auto& c : cfgs) {
    c.validate();
    eff.push_back(c.effective());
  }
  return eff;
}

InitialCondition initialize_impl(const std::vector<PlatoonConfig>& eff,
                                 const std::vector<Role>& roles, const Scenario& s,
                                 const RunOptions& opt) {
  InitialCondition ic;
  const int total = static_cast<int>(roles.size()) - 1;
  const double v0 = s.v0;

  std::vector<double> p0(total + 1, opt.position_offset);
  int gi = 1;
  for (const auto& c : eff) {
    for (int m = 1; m <= c.n; ++m, ++gi) {
      const double gap = equilibrium_gap(c, m, v0);
      if (!(gap > 0.0)) {
        std::ostringstream msg;
        msg << "initialize_platoon: non-positive equilibrium gap " << gap << " m for vehicle "
            << gi;
        throw ConfigError(msg.str());
      }
      p0[gi] = p0[gi - 1] - gap;
    }
  }

  const auto back = static_cast<std::size_t>(std::ceil(longest_delay(roles) / opt.dt - 1e-9)) + 2;
  const double t_first = -static_cast<double>(back) * opt.dt;
  const double a_exo = exogenous_profile(s, 0.0);

  for (int i = 0; i <= total; ++i) {
    std::vector<VehicleState> pre;
    pre.reserve(back + 1);
    for (std::size_t k = 0; k <= back; ++k) {
      const double t = -static_cast<double>(back - k) * opt.dt;
      pre.push_back({p0[i] + v0 * t, v0, 0.0});
    }
    if (i == 0) pre.back().a = a_exo;
    ic.states.push_back(pre.back());
    ic.histories.emplace_back(opt.dt, t_first, std::move(pre));
  }
  return ic;
}

}  // namespace

InitialCondition initialize_platoon(std::span<const PlatoonConfig> cfgs, const Scenario& s,
                                    const RunOptions& opt) {
  s.validate();
  if (!(opt.dt > 0.0)) throw ConfigError("dt must be > 0");
  const auto eff = effective_all(cfgs);
  InitialCondition ic;
  const auto roles = build_roles(eff, ic.platoon_starts);
  auto out = initialize_impl(eff, roles, s, opt);
  out.platoon_starts = std::move(ic.platoon_starts);
  return out;
}

InitialCondition initialize_platoon(const PlatoonConfig& cfg, const Scenario& s, double dt) {
  RunOptions opt;
  opt.dt = dt;
  return initialize_platoon(std::span<const PlatoonConfig>(&cfg, 1), s, opt);
}

SimulationTrace run_multi(std::span<const PlatoonConfig> cfgs, const Scenario& s,
                          const RunOptions& opt) {
  s.validate();
  if (!(opt.dt > 0.0) || !std::isfinite(opt.dt)) throw ConfigError("dt must be > 0");
  const auto eff = effective_all(cfgs);
  std::vector<int> starts;
  const auto roles = build_roles(eff, starts);
  InitialCondition ic = initialize_impl(eff, roles, s, opt);

  const int total = static_cast<int>(roles.size()) - 1;
  const double dt = opt.dt;
  const auto steps = static_cast<std::size_t>(std::floor(s.duration / dt + 1e-9)) + 1;

  SimulationTrace tr;
  tr.dt = dt;
  tr.duration = s.duration;
  tr.length = eff.front().vehicle.length;
  tr.platoon_starts = starts;
  tr.t.resize(steps);
  tr.vehicles.resize(total + 1);
  for (auto& vs : tr.vehicles) {
    vs.p.resize(steps);
    vs.v.resize(steps);
    vs.a.resize(steps);
    vs.u.resize(steps);
    vs.ds.resize(steps);
  }
  std::vector<bool> collided(total + 1, false);

  std::vector<VehicleState>& x = ic.states;
  std::vector<StateHistory>& hist = ic.histories;
  std::vector<double> u(total + 1, 0.0), ds(total + 1, 0.0);
  std::vector<const StateHistory*> preds;

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;

    // Control from committed histories only.
    u[0] = x[0].a;
    for (int idx = 1; idx <= total; ++idx) {
      const int i = opt.reverse_evaluation ? total + 1 - idx : idx;
      const Role& r = roles[i];
      const PlatoonConfig& c = *r.cfg;
      const double L = c.vehicle.length;
      const double d = c.vehicle.standstill;
      switch (r.law) {
        case Law::CtgLeader: {
          const CtgChannels ch = ctg_channels(x[i], hist[r.pred], t, c.ctg, L, d, r.accel_available);
          ds[i] = ch.spacing;
          u[i] = c.ctg.k_s * ch.spacing + c.ctg.k_v * ch.speed + c.ctg.k_a * ch.accel;
          break;
        }
        case Law::CtgFollower: {
          CtgParams fp = c.ctg;
          fp.h = c.h_follower;
          preds.clear();
          for (int j : r.preds) preds.push_back(&hist[j]);
          ds[i] = ctg_spacing_error(x[i], hist[r.pred], t, fp, L, d);
          u[i] = ctg_follower_control(x[i], preds, t, fp, L, d, c.r);
          break;
        }
        case Law::Cs: {
          const CsChannels ch = cs_channels(x[i], hist[r.pred], hist[r.leader], t, c.cs, L, d,
                                            r.index_i, r.accel_available);
          ds[i] = ch.pred_spacing;
          u[i] = cs_combine(ch, c.cs);
          break;
        }
      }
      if (!std::isfinite(u[i])) {
        std::ostringstream msg;
        msg << "non-finite control for vehicle " << i << " at step " << k << " (t=" << t << ")";
        throw NumericError(msg.str());
      }
    }

    tr.t[k] = t;
    for (int i = 0; i <= total; ++i) {
      auto& vs = tr.vehicles[i];
      vs.p[k] = x[i].p;
      vs.v[k] = x[i].v;
      vs.a[k] = x[i].a;
      vs.u[k] = u[i];
      vs.ds[k] = i == 0 ? 0.0 : ds[i];
    }
    for (int i = 1; i <= total; ++i) {
      const double gap = x[i - 1].p - x[i].p - roles[i].cfg->vehicle.length;
      if (gap <= 0.0) {
        tr.collision = true;
        if (!collided[i]) {
          collided[i] = true;
          tr.collisions.push_back({i, k, t, gap});
        }
      }
    }
    if (k + 1 == steps) break;

    // Advance every vehicle, then commit.
    const double t_next = static_cast<double>(k + 1) * dt;
    VehicleState exo{x[0].p + dt * x[0].v, x[0].v + dt * x[0].a,
                     exogenous_profile(s, std::min(t_next, s.duration))};
    x[0] = exo;
    for (int i = 1; i <= total; ++i) x[i] = step_dynamics(x[i], u[i], roles[i].cfg->vehicle.phi, dt);
    for (int i = 0; i <= total; ++i) {
      if (!is_finite(x[i])) {
        std::ostringstream msg;
        msg << "non-finite state for vehicle " << i << " at step " << k + 1;
        throw NumericError(msg.str());
      }
      hist[i].append(x[i]);
    }
  }
  return tr;
}

SimulationTrace run_multi(std::span<const PlatoonConfig> cfgs, const Scenario& s, double dt) {
  RunOptions opt;
  opt.dt = dt;
  return run_multi(cfgs, s, opt);
}

SimulationTrace run(const PlatoonConfig& cfg, const Scenario& s, const RunOptions& opt) {
  return run_multi(std::span<const PlatoonConfig>(&cfg, 1), s, opt);
}

SimulationTrace run(const PlatoonConfig& cfg, const Scenario& s, double dt) {
  RunOptions opt;
  opt.dt = dt;
  return run(cfg, s, opt);
}

}  // namespace platoon
