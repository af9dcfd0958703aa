#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lanechange/hamiltonian.hpp"
#include "support.hpp"

using namespace lanechange;
using lanechange::testing::Rng;

namespace {

// Cost recomputed by Simpson quadrature of the sampled extremal.
double quadrature_cost(const PolynomialSolution& sol, const MergeAheadProblem& pb) {
  const int n = 2000;
  const double t0 = sol.t0, tf = sol.t_f, h = (tf - t0) / n;
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    const auto s = eval_polynomial(sol, t0 + k * h);
    const double f = 0.5 * pb.alpha_u() * (s.u_1 * s.u_1 + s.u_C * s.u_C);
    acc += f * (k == 0 || k == n ? 1.0 : (k % 2 ? 4.0 : 2.0));
  }
  const auto e = eval_polynomial(sol, tf);
  return acc * h / 3.0 + pb.weights.alpha_t * (tf - t0) +
         0.5 * pb.alpha_v() *
             (std::pow(e.v_1 - pb.v_d_1, 2) + std::pow(e.v_C - pb.v_d_C, 2));
}

}  // namespace

TEST_CASE("extremals satisfy the optimality system and conserve the Hamiltonian") {
  Rng rng(21);
  int solved = 0;
  for (int i = 0; i < 25; ++i) {
    MergeAheadProblem pb = lanechange::testing::random_merge_ahead(rng);
    pb.t0 = rng.uniform(0.0, 3.0);
    const auto sol = solve_polynomial(pb);
    REQUIRE(sol.has_value());
    ++solved;
    CHECK(sol->a_1 == -sol->nu);
    CHECK(sol->a_C == sol->nu);
    const auto r = residuals(*sol, pb);
    for (int k = 0; k < 10; ++k) CHECK(std::abs(r[k]) <= 1e-8);
    CHECK(r[10] <= 1e-8);
    for (int k = 0; k <= 100; ++k) {
      const double t = sol->t0 + (sol->t_f - sol->t0) * k / 100.0;
      CHECK(std::abs(hamiltonian(*sol, pb, t)) <= 1e-9);
    }
    CHECK(polynomial_objective(*sol, pb) == doctest::Approx(quadrature_cost(*sol, pb)).epsilon(1e-10));
  }
  CHECK(solved == 25);
}

TEST_CASE("initial conditions, costates and stationarity hold pointwise") {
  Rng rng(4);
  const MergeAheadProblem pb = lanechange::testing::random_merge_ahead(rng);
  const auto sol = solve_polynomial(pb);
  REQUIRE(sol.has_value());
  const auto s0 = eval_polynomial(*sol, pb.t0);
  CHECK(s0.x_1 == doctest::Approx(pb.cav1.x));
  CHECK(s0.v_1 == doctest::Approx(pb.cav1.v));
  CHECK(s0.x_C == doctest::Approx(pb.cavC.x));
  CHECK(s0.v_C == doctest::Approx(pb.cavC.v));
  const double h = 1e-5;
  for (double f : {0.2, 0.5, 0.8}) {
    const double t = pb.t0 + f * (sol->t_f - pb.t0);
    const auto s = eval_polynomial(*sol, t);
    const auto lam = costates(*sol, t);
    // dH/du = alpha_u u + lambda_v = 0
    CHECK(pb.alpha_u() * s.u_1 + lam.lv_1 == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    CHECK(pb.alpha_u() * s.u_C + lam.lv_C == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    // lambda_x' = 0 and lambda_v' = -lambda_x
    const auto lp = costates(*sol, t + h), lm = costates(*sol, t - h);
    CHECK((lp.lx_1 - lm.lx_1) / (2 * h) == doctest::Approx(0.0).scale(1.0));
    CHECK((lp.lv_1 - lm.lv_1) / (2 * h) == doctest::Approx(-lam.lx_1).epsilon(1e-6));
    CHECK((lp.lv_C - lm.lv_C) / (2 * h) == doctest::Approx(-lam.lx_C).epsilon(1e-6));
    // v' = u and x' = v
    const auto sp = eval_polynomial(*sol, t + h), sm = eval_polynomial(*sol, t - h);
    CHECK((sp.v_C - sm.v_C) / (2 * h) == doctest::Approx(s.u_C).epsilon(1e-6));
    CHECK((sp.x_1 - sm.x_1) / (2 * h) == doctest::Approx(s.v_1).epsilon(1e-8));
  }
  const auto e = eval_polynomial(*sol, sol->t_f);
  CHECK(e.x_C - e.x_1 == doctest::Approx(safe_distance(e.v_1, pb.safety)).epsilon(1e-10));
  CHECK_THROWS_AS(eval_polynomial(*sol, sol->t_f + 1.0), std::out_of_range);
}

TEST_CASE("closed form and transcription agree when the bounds stay slack") {
  Rng rng(7);
  int compared = 0;
  for (int tries = 0; compared < 25 && tries < 200; ++tries) {
    const MergeAheadProblem pb = lanechange::testing::random_merge_ahead(rng);
    const MergeAheadResult a = solve_merge_ahead_cav1(pb);
    if (!a.analytic_converged || !a.bounds_inactive) continue;
    ++compared;
    CHECK_FALSE(a.used_numeric);
    const NlpSolution n = solve_merge_ahead_numeric(pb);
    REQUIRE(n.converged());
    CHECK(std::abs(a.objective - n.objective) / n.objective <= 1e-3);
    CHECK(std::abs(a.t_f - n.t_f) <= 0.02);
  }
  CHECK(compared == 25);
}

TEST_CASE("active bounds hand the problem to the transcription") {
  MergeAheadProblem pb;
  pb.scaling = {10.89, 12.5};
  pb.cav1 = {20.0, 28.0};
  pb.cavC = {0.0, 24.0};
  pb.weights.alpha_v = 0.8;
  const MergeAheadResult r = solve_merge_ahead_cav1(pb);
  REQUIRE(r.feasible());
  CHECK(r.used_numeric);
  const double tf = r.t_f;
  const VehicleState one = r.traj_1.state_at(tf), C = r.traj_C.state_at(tf);
  CHECK(C.x - one.x == doctest::Approx(safe_distance(one.v, pb.safety)).epsilon(1e-6));
  for (const auto& s : r.traj_C.samples()) {
    CHECK(s.u <= 3.3 + 1e-6);
    CHECK(s.v <= 35.0 + 1e-6);
  }
  CHECK(r.objective == doctest::Approx(r.time_cost + r.agent_costs[0] + r.agent_costs[1]));
}

TEST_CASE("bounds check catches excursions anywhere on the arc") {
  PolynomialSolution s;
  s.alpha_u = 1.0;
  s.t_f = 2.0;
  s.c_1 = s.c_C = 25.0;
  CHECK(bounds_inactive(s, VehicleLimits{}));
  s.b_C = 4.0;  // u_C = 4 > 3.3
  CHECK_FALSE(bounds_inactive(s, VehicleLimits{}));
}
