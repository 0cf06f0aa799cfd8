#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "platoon/errors.hpp"
#include "platoon/moe.hpp"
#include "platoon/simulation.hpp"

using namespace platoon;

namespace {

double max_abs(const std::vector<double>& x, std::size_t from = 0, std::size_t to = SIZE_MAX) {
  double m = 0.0;
  for (std::size_t k = from; k < std::min(to, x.size()); ++k) m = std::max(m, std::abs(x[k]));
  return m;
}

bool same_series(const SimulationTrace& a, const SimulationTrace& b) {
  if (a.t != b.t || a.vehicles.size() != b.vehicles.size()) return false;
  for (std::size_t i = 0; i < a.vehicles.size(); ++i) {
    const auto &x = a.vehicles[i], &y = b.vehicles[i];
    if (x.p != y.p || x.v != y.v || x.a != y.a || x.u != y.u || x.ds != y.ds) return false;
  }
  return a.collision == b.collision && a.platoon_starts == b.platoon_starts;
}

std::vector<PlatoonConfig> every_system(int n) {
  return {PlatoonConfig::hybrid(n), PlatoonConfig::cs_platoon(n), PlatoonConfig::ctg_platoon(n, 2),
          PlatoonConfig::ctg_platoon(n, 3)};
}

}  // namespace

TEST_SUITE("simulation") {
  TEST_CASE("decel-accel profile") {
    const Scenario s = Scenario::decel_accel();
    CHECK(exogenous_profile(s, 34.0) == -2.5);
    CHECK(exogenous_profile(s, 29.9) == 0.0);
    CHECK(exogenous_profile(s, 50.0) == 0.0);
    CHECK(exogenous_profile(s, 70.0) == 2.5);
    CHECK(exogenous_profile(s, 100.0) == 0.0);
    CHECK_THROWS_AS(exogenous_profile(s, -0.5), RangeError);
    CHECK_THROWS_AS(exogenous_profile(s, 120.5), RangeError);
  }

  TEST_CASE("periodic profile peak and cutoff") {
    const Scenario s = Scenario::periodic();
    double peak = 0.0;
    for (int k = 0; k <= 80000; ++k) peak = std::max(peak, std::abs(exogenous_profile(s, k * 0.001)));
    CHECK(peak <= 2.3 + 1e-12);
    CHECK(std::abs(exogenous_profile(s, s.period / 4.0) - 2.3) < 1e-12);
    CHECK(std::abs(exogenous_profile(s, 3.0 * s.period / 4.0) + 2.3) < 1e-12);
    CHECK(exogenous_profile(s, 80.0) == 0.0);
    CHECK(exogenous_profile(s, 100.0) == 0.0);
  }

  TEST_CASE("custom profile interpolates and clamps") {
    const Scenario s = Scenario::custom({{1.0, 0.0}, {2.0, -2.0}, {4.0, 2.0}}, 10.0, 20.0);
    CHECK(exogenous_profile(s, 0.0) == 0.0);
    CHECK(exogenous_profile(s, 1.5) == doctest::Approx(-1.0));
    CHECK(exogenous_profile(s, 3.0) == doctest::Approx(0.0));
    CHECK(exogenous_profile(s, 9.0) == 2.0);
    CHECK_THROWS_AS(Scenario::custom({{1.0, 0.0}, {1.0, 1.0}}, 10.0, 20.0).validate(), ConfigError);
  }

  TEST_CASE("equilibrium gaps") {
    PlatoonConfig h = PlatoonConfig::hybrid(4).effective();
    // Both include the g v0 compensation term: 38 + 2 and 10 + 2.
    CHECK(equilibrium_gap(h, 1, 20.0) == doctest::Approx(40.0));
    CHECK(equilibrium_gap(h, 2, 20.0) == doctest::Approx(12.0));
    for (const auto& c : every_system(4))
      for (int i = 1; i <= 4; ++i) CHECK(equilibrium_gap(c.effective(), i, 0.0) == doctest::Approx(10.0));

    const InitialCondition ic = initialize_platoon(PlatoonConfig::hybrid(4), Scenario::cruise(20.0, 10.0));
    CHECK(ic.states[0].p - ic.states[1].p == doctest::Approx(40.0));
    CHECK(ic.states[2].p - ic.states[3].p == doctest::Approx(12.0));
    for (const auto& st : ic.states) {
      CHECK(st.v == 20.0);
      CHECK(st.a == 0.0);
    }
  }

  TEST_CASE("non-positive equilibrium gap is a configuration error") {
    CHECK_THROWS_AS(initialize_platoon(PlatoonConfig::hybrid(3), Scenario::cruise(-30.0, 10.0)), ConfigError);
  }

  TEST_CASE("config validation") {
    PlatoonConfig c = PlatoonConfig::hybrid(1);
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = PlatoonConfig::ctg_platoon(5, 2);
    c.r = 4;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = PlatoonConfig::hybrid(5);
    c.cs.q3 = -1.0;
    CHECK_THROWS_AS(c.validate(), DegenerateGainError);
    CHECK(platoon_kind_from_string("hybrid") == PlatoonKind::Hybrid);
    CHECK(platoon_kind_from_string("CTG") == PlatoonKind::CTG);
    CHECK_THROWS_AS(platoon_kind_from_string("ACC"), ConfigError);
    CHECK(leader_kind_from_string("AV_HDV") == LeaderKind::AvHdv);
  }

  TEST_CASE("equilibrium is a fixed point for every system") {
    for (const auto& c : every_system(6)) {
      for (auto leader : {LeaderKind::CAV, LeaderKind::AvHdv}) {
        PlatoonConfig cfg = c;
        cfg.exogenous_leader = leader;
        const SimulationTrace tr = run(cfg, Scenario::cruise(25.0, 20.0));
        for (int i = 1; i <= 6; ++i) {
          CHECK(max_abs(tr.vehicles[i].u) < 1e-9);
          CHECK(max_abs(tr.vehicles[i].ds) < 1e-9);
        }
      }
    }
  }

  TEST_CASE("trace shape") {
    const SimulationTrace tr = run(PlatoonConfig::hybrid(5), Scenario::decel_accel());
    CHECK(tr.steps() == 1201);
    CHECK(tr.platoon_size() == 5);
    for (const auto& v : tr.vehicles) {
      CHECK(v.p.size() == 1201);
      CHECK(v.ds.size() == 1201);
    }
    CHECK(tr.t.back() == doctest::Approx(120.0));
    const SimulationTrace fine = run(PlatoonConfig::hybrid(2), Scenario::cruise(20.0, 1.0), 0.03);
    CHECK(fine.steps() == 34);
  }

  TEST_CASE("stable gains attenuate, unstable gains amplify") {
    for (double lambda : {0.1, 0.3}) {
      PlatoonConfig cfg = PlatoonConfig::hybrid(5);
      cfg.cs.lambda = lambda;
      const SimulationTrace tr = run(cfg, Scenario::periodic());
      const double lead_amp = max_abs(tr.vehicles[0].a);
      const double tail_amp = max_abs(tr.vehicles[5].a);
      if (lambda == 0.1) CHECK(tail_amp < lead_amp);
      else CHECK(tail_amp > lead_amp);
      // Spacing errors die out once the disturbance stops.
      for (int i = 1; i <= 5; ++i) {
        const double during = max_abs(tr.vehicles[i].ds, 0, 800);
        const double after = max_abs(tr.vehicles[i].ds, 1100);
        CHECK(after < 0.05 * during);
      }
    }
  }

  TEST_CASE("back-to-back platoons") {
    std::vector<PlatoonConfig> two{PlatoonConfig::hybrid(4), PlatoonConfig::hybrid(4)};
    const SimulationTrace tr = run_multi(two, Scenario::decel_accel());
    CHECK(tr.platoon_size() == 8);
    CHECK(tr.platoon_starts == std::vector<int>{1, 5});
    CHECK(std::abs(dampening_ratio(tr) - 0.96) < 0.05);
    CHECK_FALSE(tr.collision);

    std::vector<PlatoonConfig> small{PlatoonConfig::hybrid(2), PlatoonConfig::hybrid(2)};
    const SimulationTrace eq = run_multi(small, Scenario::cruise(30.0, 20.0));
    for (int i = 1; i <= 4; ++i) CHECK(max_abs(eq.vehicles[i].u) < 1e-9);

    std::vector<PlatoonConfig> mixed{PlatoonConfig::cs_platoon(3), PlatoonConfig::ctg_platoon(3, 2)};
    const SimulationTrace mx = run_multi(mixed, Scenario::cruise(30.0, 20.0));
    for (int i = 1; i <= 6; ++i) CHECK(max_abs(mx.vehicles[i].u) < 1e-9);
  }

  TEST_CASE("a single-element chain is a plain run") {
    for (const auto& c : every_system(5)) {
      std::vector<PlatoonConfig> one{c};
      CHECK(same_series(run_multi(one, Scenario::decel_accel()), run(c, Scenario::decel_accel())));
    }
  }

  TEST_CASE("reruns and evaluation order give identical traces") {
    for (const auto& c : every_system(6)) {
      const SimulationTrace a = run(c, Scenario::periodic());
      const SimulationTrace b = run(c, Scenario::periodic());
      RunOptions rev;
      rev.reverse_evaluation = true;
      const SimulationTrace r = run(c, Scenario::periodic(), rev);
      CHECK(same_series(a, b));
      CHECK(same_series(a, r));
    }
  }

  TEST_CASE("halving the step barely moves the dampening ratio") {
    for (const auto& c : every_system(4)) {
      const double coarse = dampening_ratio(run(c, Scenario::decel_accel(), 0.1));
      const double fine = dampening_ratio(run(c, Scenario::decel_accel(), 0.05));
      CHECK(std::abs(coarse - fine) < 0.01);
    }
  }

  TEST_CASE("shifting every position changes nothing else") {
    const PlatoonConfig c = PlatoonConfig::hybrid(5);
    RunOptions shifted;
    shifted.position_offset = 1234.5;
    const SimulationTrace a = run(c, Scenario::decel_accel());
    const SimulationTrace b = run(c, Scenario::decel_accel(), shifted);
    for (std::size_t i = 0; i < a.vehicles.size(); ++i) {
      for (std::size_t k = 0; k < a.steps(); ++k) {
        REQUIRE(std::abs(b.vehicles[i].p[k] - a.vehicles[i].p[k] - 1234.5) < 1e-8);
        REQUIRE(std::abs(b.vehicles[i].u[k] - a.vehicles[i].u[k]) < 1e-9);
        REQUIRE(std::abs(b.vehicles[i].ds[k] - a.vehicles[i].ds[k]) < 1e-9);
      }
    }
    const MoeSummary ma = summarize(a, nullptr), mb = summarize(b, nullptr);
    CHECK(std::abs(ma.outflow - mb.outflow) < 1e-9);
    CHECK(std::abs(ma.dampening_ratio - mb.dampening_ratio) < 1e-9);
    CHECK(std::abs(ma.max_jerk - mb.max_jerk) < 1e-9);
    CHECK(ma.tet == mb.tet);
  }

  TEST_CASE("shipped scenarios stay ordered and moving") {
    for (const Scenario& s : {Scenario::periodic(), Scenario::decel_accel()}) {
      for (int n = 4; n <= 10; ++n) {
        for (const auto& c : every_system(n)) {
          const SimulationTrace tr = run(c, s);
          INFO(to_string(c.kind), " r=", c.r, " n=", n, " ", to_string(s.kind));
          CHECK_FALSE(tr.collision);
          for (const auto& v : tr.vehicles) CHECK(*std::min_element(v.v.begin(), v.v.end()) > 0.0);
        }
      }
    }
  }

  TEST_CASE("collisions are flagged and the run continues") {
    PlatoonConfig c = PlatoonConfig::cs_platoon(3);
    c.vehicle.phi = 2.0;
    const Scenario hard = Scenario::custom({{5.0, 0.0}, {5.1, -9.0}, {8.0, -9.0}, {8.1, 0.0}}, 30.0, 30.0);
    const SimulationTrace tr = run(c, hard);
    CHECK(tr.collision);
    REQUIRE_FALSE(tr.collisions.empty());
    CHECK(tr.collisions.front().gap <= 0.0);
    CHECK(tr.steps() == 301);
  }

  TEST_CASE("overflow is reported with its step") {
    const Scenario wild = Scenario::custom({{0.0, 0.0}, {1.0, 1e306}}, 60.0, 30.0);
    try {
      run(PlatoonConfig::hybrid(4), wild);
      FAIL("expected a NumericError");
    } catch (const NumericError& e) {
      CHECK(std::string(e.what()).find("step") != std::string::npos);
    }
  }

  TEST_CASE("an AV/HDV leader removes the acceleration channel") {
    PlatoonConfig c = PlatoonConfig::hybrid(4);
    c.exogenous_leader = LeaderKind::AvHdv;
    const SimulationTrace tr = run(c, Scenario::decel_accel());
    const auto &x0 = tr.vehicles[0], &x1 = tr.vehicles[1];
    for (std::size_t k = 1; k < tr.steps(); ++k) {
      const double ds = x0.p[k - 1] - x1.p[k] - 10.0 - 1.4 * x1.v[k];
      REQUIRE(std::abs(x1.u[k] - (0.1 * ds + 0.7 * (x0.v[k - 1] - x1.v[k]))) < 1e-9);
    }
    CHECK_FALSE(tr.collision);
  }

  TEST_CASE("invalid step sizes") {
    CHECK_THROWS_AS(run(PlatoonConfig::hybrid(3), Scenario::decel_accel(), 0.0), ConfigError);
    CHECK_THROWS_AS(run(PlatoonConfig::hybrid(3), Scenario::decel_accel(), -0.1), ConfigError);
  }
}
