#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "lanechange/crosscheck.hpp"
#include "lanechange/oracle.hpp"
#include "lanechange/scenario.hpp"

using namespace lanechange;

TEST_CASE("one full-throttle segment reproduces the closed-form catch-up") {
  const ScenarioConfig cfg;
  OcpSpec spec = OcpSpec::with_free_horizon(0.0, 0.05, 15.0);
  spec.time_weight = cfg.weights.alpha_t;
  AgentSpec a;
  a.init = cfg.cavC;
  a.effort_weight = cfg.weights.alpha_u / cfg.scaling.effort;
  a.terminal_speed_weight = cfg.weights.alpha_v / cfg.scaling.speed;
  a.terminal_speed_target = cfg.v_d_1;
  spec.agents = {a};
  spec.terminal.push_back({{{0, StateVar::X, 1.0}}, -cfg.hdv.v, -cfg.hdv.x, ConstraintKind::Equal});
  OracleOptions o;
  o.segments = 1;
  o.levels = {3.3};
  const OracleResult r = brute_force_oracle_serial(spec, o);
  REQUIRE(r.found);
  const double t1 = (3.0 + std::sqrt(9.0 + 66.0)) / 3.3;
  CHECK(r.t_f == doctest::Approx(t1).epsilon(1e-9));
  const double v = 23.0 + 3.3 * t1;
  CHECK(r.objective == doctest::Approx(0.55 * t1 + 0.5 * (0.2 / 10.89) * 3.3 * 3.3 * t1 +
                                       0.02 * (v - 30) * (v - 30))
                           .epsilon(1e-9));
}

TEST_CASE("fixed-horizon enumeration finds the unique exact control") {
  OcpSpec spec = OcpSpec::with_fixed_horizon(0.0, 2.0);
  AgentSpec a;
  a.init = {0.0, 20.0};
  a.effort_weight = 0.0;
  a.terminal_speed_weight = 1.0;
  a.terminal_speed_target = 21.0;  // reached by u = 1 then u = 0
  spec.agents = {a};
  OracleOptions o;
  o.segments = 2;
  o.levels = {-1.0, 0.0, 1.0};
  const OracleResult r = brute_force_oracle(spec, o);
  REQUIRE(r.found);
  CHECK(r.objective == doctest::Approx(0.0).scale(1.0));
  CHECK(r.candidates == 9);
  CHECK(r.feasible == 9);
  // flat index: level of segment 0 is the least significant digit; (1, 0) and
  // (0, 1) tie and the smaller index wins
  CHECK(r.index == 2 + 3 * 1);
  CHECK(r.controls[0].front() == 1.0);
  CHECK(r.controls[0].back() == 0.0);
}

TEST_CASE("parallel enumeration matches the serial reference") {
  const OcpSpec spec = shrunken_catchup_spec(3, true);
  OracleOptions o;
  o.levels = {-7.0, -2.0, 0.0, 1.5, 3.3};
  const OracleResult s = brute_force_oracle_serial(spec, o);
  const OracleResult p = brute_force_oracle(spec, o);
  REQUIRE(s.found);
  CHECK(p.index == s.index);
  CHECK(p.objective == s.objective);
  CHECK(p.t_f == s.t_f);
  CHECK(p.feasible == s.feasible);
}

TEST_CASE("oversized searches are refused") {
  const OcpSpec spec = shrunken_catchup_spec(1, true);
  OracleOptions o;
  o.segments = 20;
  o.levels = std::vector<double>(10, 0.0);
  CHECK_THROWS_AS(brute_force_oracle(spec, o), std::invalid_argument);
}

TEST_CASE("the solver is never beaten by piecewise-constant enumeration") {
  for (const auto& c : oracle_crosscheck(101, 4)) {
    INFO("seed " << c.seed);
    CHECK(c.dominates(0.01));
  }
}
