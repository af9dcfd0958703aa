#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lanechange/disruption.hpp"
#include "lanechange/safety.hpp"
#include "lanechange/trajectory.hpp"
#include "lanechange/vehicle.hpp"
#include "support.hpp"

using namespace lanechange;

TEST_CASE("safe distance is affine in speed") {
  const SafetyParams p;
  CHECK(safe_distance(0.0, p) == doctest::Approx(1.5));
  CHECK(safe_distance(26.0, p) == doctest::Approx(17.1));
  CHECK(safe_distance(30.0, SafetyParams{1.0, 2.0}) == doctest::Approx(32.0));
}

TEST_CASE("parameter validation rejects inverted boxes") {
  CHECK_NOTHROW(VehicleLimits{}.validate());
  CHECK_THROWS_AS((VehicleLimits{1.0, 3.3, 15.0, 35.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((VehicleLimits{-7.0, 3.3, 35.0, 15.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((SafetyParams{-0.1, 1.5}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((SafetyParams{0.6, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((DisruptionWeights{0.7, 0.7}.validate()), std::invalid_argument);
}

TEST_CASE("constant-control flow matches kinematics") {
  const VehicleState s = propagate({10.0, 20.0}, 2.0, 1.0, 4.0);
  CHECK(s.v == doctest::Approx(26.0));
  CHECK(s.x == doctest::Approx(10.0 + 20.0 * 3.0 + 0.5 * 2.0 * 9.0));
}

TEST_CASE("smooth-control flow is exact for polynomial inputs") {
  // u = 3 t^2 - t: v = v0 + t^3 - t^2/2, x = x0 + v0 t + t^4/4 - t^3/6
  auto u = [](double t) { return 3.0 * t * t - t; };
  const VehicleState s = propagate({1.0, 2.0}, u, 0.0, 2.0);
  CHECK(s.v == doctest::Approx(2.0 + 8.0 - 2.0).epsilon(1e-12));
  CHECK(s.x == doctest::Approx(1.0 + 4.0 + 4.0 - 8.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("trajectory evaluation between samples follows the exact flow") {
  const std::vector<double> t{0.0, 1.0, 3.0};
  const std::vector<double> u{1.0, -2.0};
  const Trajectory tr = Trajectory::from_controls({0.0, 10.0}, t, u);
  REQUIRE(tr.size() == 3);
  CHECK(tr.back().v == doctest::Approx(7.0));
  CHECK(tr.back().x == doctest::Approx(10.5 + 11.0 * 2.0 - 4.0));
  const auto mid = tr.at(2.0);
  CHECK(mid.v == doctest::Approx(9.0));
  CHECK(mid.u == doctest::Approx(-2.0));
  CHECK_THROWS_AS(tr.at(3.5), std::out_of_range);
  CHECK_THROWS_AS(Trajectory({{1.0, 0, 0, 0}, {1.0, 0, 0, 0}}), std::invalid_argument);
}

TEST_CASE("resampling and concatenation preserve the motion") {
  const std::vector<double> t{0.0, 1.0, 2.0};
  const Trajectory a = Trajectory::from_controls({0.0, 20.0}, t, std::vector<double>{1.0, -1.0});
  const std::vector<double> fine{0.0, 0.5, 1.0, 1.25, 2.0};
  const Trajectory r = a.resampled(fine);
  for (double s : {0.3, 1.1, 1.9}) {
    CHECK(r.at(s).x == doctest::Approx(a.at(s).x));
    CHECK(r.at(s).v == doctest::Approx(a.at(s).v));
  }
  const Trajectory b = Trajectory::constant_speed(a.state_at(2.0), 2.0, 4.0, 5);
  const Trajectory ab = a.concatenated(b);
  CHECK(ab.t_end() == doctest::Approx(4.0));
  CHECK(ab.at(3.0).x == doctest::Approx(a.back().x + a.back().v));
  const std::vector<Trajectory> both{a, b};
  CHECK(merge_time_grids(both).size() == 3 + 5 - 1);
}

TEST_CASE("safety triplet flags each condition independently") {
  const SafetyParams p;
  const double T = 4.0;
  auto cruise = [&](double x, double v) { return Trajectory::constant_speed({x, v}, 0.0, T, 9); };
  // H at 0, C at 20, 1 at 50, all at 25 m/s: every gap is 20 or 30 > d(25) = 16.5
  CHECK(check_safety_triplet(cruise(50, 25), cruise(20, 25), cruise(0, 25), p, T).empty());

  const auto v1 = check_safety_triplet(cruise(10, 25), cruise(5, 25), cruise(0, 25), p, T);
  bool rear = false, behind = false, ahead = false;
  for (const auto& v : v1) {
    rear |= v.constraint == SafetyConstraint::RearEndCav1Hdv;
    behind |= v.constraint == SafetyConstraint::TerminalCavCHdv;
    ahead |= v.constraint == SafetyConstraint::TerminalCav1CavC;
    CHECK(v.slack < 0.0);
  }
  CHECK(rear);
  CHECK(behind);
  CHECK(ahead);

  const auto v2 = check_safety_triplet(cruise(20, 25), cruise(40, 25), cruise(0, 25), p, T,
                                       kSafetyTolerance, MergeSlot::AheadOfCav1);
  CHECK(v2.empty());
  const auto m = safety_margins(cruise(20, 25), cruise(40, 25), cruise(0, 25), p, T,
                                MergeSlot::AheadOfCav1);
  CHECK(m.rear_end == doctest::Approx(20.0 - 16.5));
  CHECK(m.merge_behind == doctest::Approx(20.0 - 16.5));
  CHECK(std::isinf(m.merge_ahead));
}

TEST_CASE("disruption of a cruising vehicle is exactly zero") {
  const Trajectory tr = Trajectory::constant_speed({3.0, 24.0}, 1.0, 6.0, 41);
  const DisruptionWeights w;
  for (auto agg : {DisruptionAggregation::Average, DisruptionAggregation::Integral,
                   DisruptionAggregation::Terminal}) {
    CHECK(disruption(tr, 3.0, 24.0, 24.0, w, agg) == 0.0);
  }
}

TEST_CASE("disruption of a braking vehicle matches closed-form integrals") {
  // u = -a from v0: lag a t^2 / 2, speed deficit a t
  const double a = 2.0, T = 3.0, v0 = 25.0;
  std::vector<double> t;
  for (int k = 0; k <= 300; ++k) t.push_back(T * k / 300.0);
  const std::vector<double> u(300, -a);
  const Trajectory tr = Trajectory::from_controls({0.0, v0}, t, u);

  // speed term: int a^2 t^2 = a^2 T^3 / 3 (Simpson is exact)
  CHECK(disruption(tr, 0.0, v0, v0, {0.0, 1.0}, DisruptionAggregation::Integral) ==
        doctest::Approx(a * a * T * T * T / 3.0).epsilon(1e-12));
  // position term: int a^2 t^4 / 4 = a^2 T^5 / 20
  CHECK(disruption(tr, 0.0, v0, v0, {1.0, 0.0}, DisruptionAggregation::Integral) ==
        doctest::Approx(a * a * std::pow(T, 5) / 20.0).epsilon(1e-8));
  const double avg = disruption(tr, 0.0, v0, v0, {0.5, 0.5}, DisruptionAggregation::Average);
  CHECK(avg == doctest::Approx(0.5 * (a * a * T * T / 3.0) + 0.5 * (a * a * std::pow(T, 4) / 20.0))
                   .epsilon(1e-8));
  CHECK(disruption(tr, 0.0, v0, v0, {0.5, 0.5}, DisruptionAggregation::Terminal) ==
        doctest::Approx(0.5 * std::pow(a * T * T / 2, 2) + 0.5 * std::pow(a * T, 2)));
}

TEST_CASE("running ahead of the cruise reference is not a disruption") {
  std::vector<double> t{0.0, 2.0};
  const Trajectory tr = Trajectory::from_controls({0.0, 20.0}, t, std::vector<double>{1.0});
  // v_d equal to the terminal speed isolates the position term, which must vanish
  CHECK(disruption_at(tr.back(), 0.0, 0.0, 20.0, 22.0, {1.0, 0.0}) == 0.0);
}
