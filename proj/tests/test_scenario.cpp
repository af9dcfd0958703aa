#include <doctest.h>

#include <cmath>
#include <vector>

#include "lanechange/scenario.hpp"
#include "support.hpp"

using namespace lanechange;

namespace {

ScenarioConfig level_start() {
  ScenarioConfig cfg;
  cfg.cavC = {0.0, 24.0};
  cfg.hdv = {0.0, 24.0};
  cfg.cav1 = {20.0, 28.0};
  cfg.weights.alpha_v = 0.8;
  return cfg;
}

bool same_trajectory(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto &p = a.samples()[k], &q = b.samples()[k];
    if (p.t != q.t || p.x != q.x || p.v != q.v || p.u != q.u) return false;
  }
  return true;
}

bool same_policy(const PolicyReport& a, const PolicyReport& b) {
  return a.cost_total == b.cost_total && a.cost_1 == b.cost_1 && a.cost_C == b.cost_C &&
         a.cost_H == b.cost_H && a.t_f == b.t_f && a.hdv_disruption == b.hdv_disruption &&
         same_trajectory(a.traj_1, b.traj_1) && same_trajectory(a.traj_C, b.traj_C) &&
         same_trajectory(a.traj_H, b.traj_H);
}

}  // namespace

TEST_CASE("evaluation is deterministic") {
  const ScenarioConfig cfg;
  const ScenarioReport a = evaluate_scenario(cfg);
  const ScenarioReport b = evaluate_scenario(cfg);
  CHECK(same_policy(a.ahead_hdv, b.ahead_hdv));
  CHECK(same_policy(a.ahead_cav1, b.ahead_cav1));
  CHECK(a.chosen == b.chosen);
}

TEST_CASE("the chosen policy is never the more expensive one") {
  lanechange::testing::Rng rng(17);
  for (int i = 0; i < 8; ++i) {
    const ScenarioReport r = evaluate_scenario(lanechange::testing::random_triplet(rng));
    if (!r.chosen) continue;
    const PolicyReport* w = r.winner();
    REQUIRE(w != nullptr);
    const PolicyReport& other = w == &r.ahead_hdv ? r.ahead_cav1 : r.ahead_hdv;
    CHECK(w->feasible);
    CHECK(w->cost_total <= other.cost_total);
    CHECK(r.violations.empty());
    CHECK(w->cost_total == doctest::Approx(w->cost_1 + w->cost_C + w->cost_H));
  }
}

TEST_CASE("a level start skips Phase I") {
  const ScenarioReport r = evaluate_scenario(level_start());
  CHECK(r.phase1_outcomes.empty());
  CHECK_FALSE(r.ahead_hdv.phase1_policy.has_value());
  CHECK(r.ahead_hdv.t1 == 0.0);
  CHECK(r.ahead_hdv.feasible);
}

TEST_CASE("merging ahead of CAV 1 leaves a distant HDV undisturbed") {
  ScenarioConfig cfg = level_start();
  cfg = with_dist(cfg, 60.0);
  CHECK(cfg.cav1.x == doctest::Approx(cfg.hdv.x + 60.0));
  const PolicyReport r = evaluate_ahead_of_cav1(cfg);
  REQUIRE(r.feasible);
  CHECK(r.hdv_disruption == 0.0);
  for (const auto& s : r.traj_H.samples()) CHECK(s.u == 0.0);
}

TEST_CASE("a C already merged ahead at the desired speed barely moves") {
  ScenarioConfig cfg;
  cfg.hdv = {0.0, 30.0};
  cfg.cav1 = {safe_distance(30.0, cfg.safety) + 1.0, 30.0};
  cfg.cavC = {cfg.cav1.x + safe_distance(30.0, cfg.safety), 30.0};
  const PolicyReport r = evaluate_ahead_of_cav1(cfg);
  REQUIRE(r.feasible);
  CHECK(r.maneuver_time <= 0.1);
  for (const auto& s : r.traj_C.samples()) CHECK(std::abs(s.u) <= 1e-3);
  CHECK(r.hdv_disruption == 0.0);
}

TEST_CASE("parallel and serial sweeps agree exactly and keep input order") {
  const std::vector<double> dists{40.0, 20.0, 30.0};
  const auto s = dist_sweep_serial(level_start(), dists);
  const auto p = dist_sweep(level_start(), dists);
  REQUIRE(s.size() == 3);
  REQUIRE(p.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(same_policy(s[i].ahead_hdv, p[i].ahead_hdv));
    CHECK(same_policy(s[i].ahead_cav1, p[i].ahead_cav1));
  }
  CHECK(s[1].ahead_cav1.cost_total < s[2].ahead_cav1.cost_total);
  CHECK(s[2].ahead_cav1.cost_total < s[0].ahead_cav1.cost_total);
}

TEST_CASE("HDV parameters do not change what merging ahead of CAV 1 costs") {
  const std::vector<double> dists{40.0};
  for (auto axis : {StudyAxis::BetaS, StudyAxis::Mu}) {
    const std::vector<double> values{0.5, 1.0, 2.0};
    const auto rows = parameter_study(level_start(), axis, values, dists);
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
      CHECK(row.report.ahead_cav1.cost_total == rows[0].report.ahead_cav1.cost_total);
      CHECK(row.report.ahead_cav1.hdv_disruption == rows[0].report.ahead_cav1.hdv_disruption);
    }
  }
  const std::vector<double> speeds{22.0, 26.0};
  const auto rows = parameter_study(level_start(), StudyAxis::DesiredSpeedH, speeds, dists);
  const auto cavs = [](const PolicyReport& p) { return p.cost_1 + p.cost_C; };
  CHECK(cavs(rows[0].report.ahead_cav1) == cavs(rows[1].report.ahead_cav1));
}

TEST_CASE("a more risk-averse HDV never makes merging ahead of it cheaper") {
  const std::vector<double> values{0.1, 0.5, 1.0};
  const std::vector<double> dists{40.0};
  const auto rows = parameter_study(level_start(), StudyAxis::BetaS, values, dists);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].report.ahead_hdv.cost_total >= rows[i - 1].report.ahead_hdv.cost_total - 1e-9);
  }
}

TEST_CASE("axis names parse and apply") {
  CHECK(parse_study_axis("beta_s") == StudyAxis::BetaS);
  CHECK(parse_study_axis("vdh") == StudyAxis::DesiredSpeedH);
  CHECK(parse_study_axis("mu") == StudyAxis::Mu);
  CHECK_FALSE(parse_study_axis("gamma").has_value());
  const ScenarioConfig base;
  CHECK(with_axis_value(base, StudyAxis::BetaS, 0.7).hdv_profile.beta_s == 0.7);
  CHECK(*with_axis_value(base, StudyAxis::DesiredSpeedH, 27.0).hdv_profile.v_d_H == 27.0);
  CHECK(with_axis_value(base, StudyAxis::Mu, 3.0).hdv_profile.mu == 3.0);
}

TEST_CASE("switch threshold is the first distance where merging ahead of the HDV wins") {
  const std::vector<double> d{20, 30, 40, 50};
  std::vector<ScenarioReport> r(4);
  r[0].chosen = MergePolicy::AheadOfCav1;
  r[1].chosen = MergePolicy::AheadOfCav1;
  r[2].chosen = MergePolicy::AheadOfHdv;
  r[3].chosen = MergePolicy::AheadOfHdv;
  CHECK(*switch_threshold(d, r) == 40.0);
  r[2].chosen = r[3].chosen = MergePolicy::AheadOfCav1;
  CHECK_FALSE(switch_threshold(d, r).has_value());
}

TEST_CASE("invalid configurations are rejected") {
  ScenarioConfig cfg;
  cfg.limits.u_min = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.disruption = {0.2, 0.2};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
