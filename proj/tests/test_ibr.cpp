#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lanechange/ibr.hpp"
#include "lanechange/scenario.hpp"
#include "support.hpp"

using namespace lanechange;

namespace {

struct Prepared {
  Phase2Setup setup;
  IbrResult result;
};

Prepared run_from(const ScenarioConfig& cfg, const IbrConfig& ibr) {
  const Phase1Scenario sc = cfg.phase1();
  const std::vector<Phase1Outcome> all{solve_noncooperative(sc, cfg.solve),
                                       solve_constant_accel(sc),
                                       solve_cooperative(sc, cfg.solve)};
  const auto p1 = select_phase1(all);
  REQUIRE(p1.has_value());
  Prepared p{cfg.phase2(*p1), {}};
  p.result = run_ibr(p.setup, ibr);
  return p;
}

void check_terminal_order(const Prepared& p) {
  const double tf = p.result.t_f_star;
  const VehicleState one = p.result.traj_1.state_at(tf);
  const VehicleState C = p.result.traj_C.state_at(tf);
  const VehicleState H = p.result.traj_H.state_at(tf);
  CHECK(C.x - H.x - safe_distance(H.v, p.setup.safety) >= -1e-6);
  CHECK(one.x - C.x - safe_distance(C.v, p.setup.safety) >= -1e-6);
}

}  // namespace

TEST_CASE("catch-up triplet reaches a fixed point without relaxation") {
  const ScenarioConfig cfg;
  const Prepared p = run_from(cfg, cfg.ibr);
  const IbrResult& r = p.result;
  REQUIRE(r.feasible);
  CHECK(r.converged);
  CHECK(r.rounds <= 5);
  CHECK(r.restarts == 0);
  REQUIRE_FALSE(r.control_change.empty());
  CHECK(r.control_change.back() <= cfg.ibr.epsilon);
  check_terminal_order(p);
}

TEST_CASE("level start reaches a fixed point without relaxation") {
  ScenarioConfig cfg;
  cfg.cavC = {0.0, 24.0};
  cfg.hdv = {0.0, 24.0};
  cfg.cav1 = {20.0, 28.0};
  cfg.weights.alpha_v = 0.8;
  // C starts level with the HDV, so Phase I ends immediately
  Phase2Setup s = cfg.phase2(solve_constant_accel(cfg.phase1()));
  const IbrResult r = run_ibr(s, cfg.ibr);
  REQUIRE(r.feasible);
  CHECK(r.converged);
  CHECK(r.rounds <= 5);
  CHECK(r.restarts == 0);
  check_terminal_order({s, r});
}

TEST_CASE("one more round from the fixed point leaves every objective unchanged") {
  const ScenarioConfig cfg;
  const Prepared p = run_from(cfg, cfg.ibr);
  const IbrResult& r = p.result;
  REQUIRE(r.converged);
  const Phase2Setup& s = p.setup;
  const double tf = r.t_f_star;
  const double tol = 1e-4;

  const NlpSolution h = solve_hdv_response(r.traj_C, r.traj_1, s.hdv, s.hdv_profile, s.t1, tf,
                                           s.safety, s.limits, s.scaling, s.solve);
  REQUIRE(h.usable());
  CHECK(h.agent_costs[0] == doctest::Approx(r.J_H_II).epsilon(tol));
  const NlpSolution c = solve_cavC_response(s, h.trajectories[0].state_at(tf), tf);
  REQUIRE(c.usable());
  const double J_C = c.agent_costs[0] + (s.time_in_phase2_cost ? s.weights.alpha_t * (tf - s.t1) : 0.0);
  CHECK(J_C == doctest::Approx(r.J_C_II).epsilon(tol));
  CHECK(control_distance(c.trajectories[0], r.traj_C) <= 10 * cfg.ibr.epsilon + 1e-4);
  const NlpSolution one = solve_cav1_response(s, c.trajectories[0].state_at(tf), tf);
  REQUIRE(one.usable());
  CHECK(one.agent_costs[0] == doctest::Approx(r.J_1_II).epsilon(tol));
}

TEST_CASE("Jacobi updates settle on the same equilibrium") {
  ScenarioConfig cfg;
  IbrConfig jac = cfg.ibr;
  jac.jacobi = true;
  const Prepared gs = run_from(cfg, cfg.ibr);
  const Prepared j = run_from(cfg, jac);
  REQUIRE(j.result.converged);
  CHECK(j.result.t_f_star == doctest::Approx(gs.result.t_f_star));
  CHECK(j.result.J_C_II == doctest::Approx(gs.result.J_C_II).epsilon(1e-4));
}

TEST_CASE("restarts stretch the horizon by lambda and stay within the cap") {
  lanechange::testing::Rng rng(5);
  for (int i = 0; i < 6; ++i) {
    const ScenarioConfig cfg = lanechange::testing::random_triplet(rng);
    const Prepared p = run_from(cfg, cfg.ibr);
    if (!p.result.feasible) continue;
    const NlpSolution ideal = solve_ideal_phase2(p.setup, cfg.ibr.T);
    REQUIRE(ideal.usable());
    const double expect_tf = ideal.t_f * std::pow(cfg.ibr.lambda, p.result.restarts);
    CHECK(p.result.t_f_star == doctest::Approx(expect_tf).epsilon(1e-6));
    const int bound =
        static_cast<int>(std::ceil(std::log(cfg.ibr.T / ideal.t_f) / std::log(cfg.ibr.lambda)));
    CHECK(p.result.restarts <= bound);
    CHECK(p.result.t_f_star <= cfg.ibr.T + 1e-9);
    check_terminal_order(p);
  }
}

TEST_CASE("control distance is the sqrt(h)-scaled L2 norm") {
  const auto a = Trajectory::constant_speed({0.0, 20.0}, 0.0, 4.0, 9);
  std::vector<double> t = a.times();
  const auto b = Trajectory::from_controls({0.0, 20.0}, t, std::vector<double>(8, 1.0));
  CHECK(control_distance(a, b) == doctest::Approx(2.0));
  CHECK(control_distance(b, b) == 0.0);
}

TEST_CASE("merge-ahead-of-HDV cost adds both phases and propagates failure") {
  Phase1Outcome p1;
  p1.cost = 1.25;
  IbrResult r;
  r.feasible = true;
  r.J_C_II = 2.0;
  CHECK(cost_merge_ahead_hdv(p1, r) == doctest::Approx(3.25));
  p1.cost = 0.0;
  CHECK(cost_merge_ahead_hdv(p1, r) == doctest::Approx(2.0));
  p1.cost = INFINITY;
  CHECK(std::isinf(cost_merge_ahead_hdv(p1, r)));
  p1.cost = 1.0;
  r.feasible = false;
  CHECK(std::isinf(cost_merge_ahead_hdv(p1, r)));
}
