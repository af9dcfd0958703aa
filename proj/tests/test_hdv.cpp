#include <doctest.h>

#include <cmath>

#include "lanechange/hdv.hpp"

using namespace lanechange;

TEST_CASE("risk function is a decreasing logistic in the gap") {
  const HdvProfile p;
  CHECK(sigmoid_safety(0.0, p) == doctest::Approx(0.5));
  CHECK(sigmoid_safety(-5.0, p) > sigmoid_safety(0.0, p));
  CHECK(sigmoid_safety(5.0, p) < sigmoid_safety(0.0, p));
  HdvProfile steep = p;
  steep.mu = 2.0;
  // 1 / (1 + 2 e^{2 (1 - 0)})
  CHECK(sigmoid_safety(1.0, steep) == doctest::Approx(1.0 / (1.0 + 2.0 * std::exp(2.0))));
}

TEST_CASE("an unconstrained driver at its desired speed keeps cruising") {
  HdvProfile p;
  p.beta_s = 0.0;
  const VehicleState h{0.0, 25.0};
  const auto one = Trajectory::constant_speed({80.0, 25.0}, 0.0, 4.0, 11);
  const auto C = Trajectory::constant_speed({30.0, 25.0}, 0.0, 4.0, 11);
  const NlpSolution s = solve_hdv_response(C, one, h, p, 0.0, 4.0, SafetyParams{});
  REQUIRE(s.converged());
  CHECK(std::abs(s.objective) <= 1e-9);
  for (const auto& smp : s.trajectories[0].samples()) CHECK(std::abs(smp.u) <= 1e-5);
}

TEST_CASE("the driver brakes to keep its headway behind a braking leader") {
  HdvProfile p;
  const VehicleState h{0.0, 25.0};
  std::vector<double> t;
  for (int k = 0; k <= 40; ++k) t.push_back(0.1 * k);
  const auto one = Trajectory::from_controls({20.0, 25.0}, t, std::vector<double>(40, -3.0));
  const auto C = Trajectory::constant_speed({40.0, 25.0}, 0.0, 4.0, 11);
  const SafetyParams sp;
  const NlpSolution s = solve_hdv_response(C, one, h, p, 0.0, 4.0, sp);
  REQUIRE(s.usable());
  for (const auto& smp : s.trajectories[0].samples()) {
    CHECK(one.state_at(smp.t).x - smp.x >= safe_distance(smp.v, sp) - 1e-6);
  }
  CHECK(s.trajectories[0].back().v < 25.0);
}

TEST_CASE("a violated initial headway is reported without solving") {
  const VehicleState h{0.0, 25.0};
  const auto one = Trajectory::constant_speed({5.0, 25.0}, 0.0, 3.0, 5);
  const auto C = Trajectory::constant_speed({-20.0, 25.0}, 0.0, 3.0, 5);
  const NlpSolution s = solve_hdv_response(C, one, h, HdvProfile{}, 0.0, 3.0, SafetyParams{});
  CHECK(s.status == NlpStatus::Infeasible);
}

TEST_CASE("the risk term pushes the driver back from a close C") {
  const VehicleState h{0.0, 25.0};
  const auto one = Trajectory::constant_speed({100.0, 25.0}, 0.0, 4.0, 11);
  const auto C = Trajectory::constant_speed({2.0, 25.0}, 0.0, 4.0, 11);
  HdvProfile calm;
  calm.beta_s = 0.0;
  HdvProfile wary;
  wary.beta_s = 1.0;
  const auto a = solve_hdv_response(C, one, h, calm, 0.0, 4.0, SafetyParams{});
  const auto b = solve_hdv_response(C, one, h, wary, 0.0, 4.0, SafetyParams{});
  REQUIRE(a.converged());
  REQUIRE(b.converged());
  CHECK(b.trajectories[0].back().x < a.trajectories[0].back().x - 1e-3);
}
