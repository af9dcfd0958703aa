#include "lanechange/scenario.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>

namespace lanechange {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PolicyReport infeasible_report(MergePolicy policy) {
  PolicyReport r;
  r.policy = policy;
  r.cost_total = r.cost_1 = r.cost_C = r.cost_H = kInf;
  return r;
}

double hdv_disruption(const ScenarioConfig& cfg, const Trajectory& traj_H) {
  return disruption(traj_H, cfg.hdv.x, cfg.hdv.v, cfg.hdv_profile.desired_speed(cfg.hdv),
                    cfg.disruption, cfg.aggregation);
}

// Runs f(i) for i in [0, n) on OpenMP threads; the first exception is rethrown.
template <class F>
void parallel_for(int n, F&& f) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      f(i);
    } catch (...) {
#pragma omp critical(lanechange_parallel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

void ScenarioConfig::validate() const {
  limits.validate();
  safety.validate();
  weights.validate();
  scaling.validate();
  hdv_profile.validate();
  disruption.validate();
  ibr.validate();
  for (const auto* s : {&cav1, &cavC, &hdv}) {
    if (!std::isfinite(s->x) || !std::isfinite(s->v) || s->v < 0.0) {
      throw std::invalid_argument("ScenarioConfig: invalid vehicle state");
    }
  }
  if (!std::isfinite(t0)) throw std::invalid_argument("ScenarioConfig: t0 not finite");
  if (!(ibr.T > t0 + min_duration) || !(min_duration > 0.0)) {
    throw std::invalid_argument("ScenarioConfig: T must exceed t0 + min_duration");
  }
  if (!(v_d_1 > 0.0 && v_d_C > 0.0)) {
    throw std::invalid_argument("ScenarioConfig: desired speeds must be > 0");
  }
  if (solve.n_nodes < 3) throw std::invalid_argument("ScenarioConfig: need at least 3 nodes");
}

Phase1Scenario ScenarioConfig::phase1() const {
  Phase1Scenario s;
  s.t0 = t0;
  s.cav1 = cav1;
  s.cavC = cavC;
  s.hdv = hdv;
  s.limits = limits;
  s.safety = safety;
  s.weights = weights;
  s.scaling = scaling;
  s.hdv_profile = hdv_profile;
  s.v_d_1 = v_d_1;
  s.v_d_C = v_d_C;
  s.T = ibr.T;
  s.min_duration = min_duration;
  return s;
}

Phase2Setup ScenarioConfig::phase2(const Phase1Outcome& p1) const {
  Phase2Setup s;
  s.t1 = p1.t1;
  s.cav1 = p1.cav1_at_t1();
  s.cavC = p1.cavC_at_t1();
  s.hdv = p1.hdv_at_t1();
  s.limits = limits;
  s.safety = safety;
  s.weights = weights;
  s.scaling = scaling;
  s.hdv_profile = hdv_profile;
  // the HDV keeps the desired speed it had at the start of the maneuver
  if (!s.hdv_profile.v_d_H) s.hdv_profile.v_d_H = hdv.v;
  s.v_d_1 = v_d_1;
  s.v_d_C = v_d_C;
  s.min_duration = min_duration;
  s.time_in_phase2_cost = time_in_phase2_cost;
  s.solve = solve;
  return s;
}

MergeAheadProblem ScenarioConfig::merge_ahead() const {
  MergeAheadProblem p;
  p.t0 = t0;
  p.cav1 = cav1;
  p.cavC = cavC;
  p.weights = weights;
  p.scaling = scaling;
  p.v_d_1 = v_d_1;
  p.v_d_C = v_d_C;
  p.safety = safety;
  p.limits = limits;
  p.T = ibr.T;
  p.min_duration = min_duration;
  return p;
}

std::string to_string(MergePolicy p) {
  return p == MergePolicy::AheadOfHdv ? "ahead-of-hdv" : "ahead-of-cav1";
}

const PolicyReport* ScenarioReport::winner() const {
  if (!chosen) return nullptr;
  return *chosen == MergePolicy::AheadOfHdv ? &ahead_hdv : &ahead_cav1;
}

PolicyReport evaluate_ahead_of_hdv(const ScenarioConfig& cfg,
                                   std::vector<Phase1Outcome>* phase1_outcomes) {
  cfg.validate();
  const Phase1Scenario sc1 = cfg.phase1();
  Phase1Outcome p1;
  std::optional<Phase1Policy> p1_policy;
  if (cfg.cavC.x >= cfg.hdv.x) {
    p1 = solve_constant_accel(sc1);  // zero-length Phase I
  } else {
    std::vector<Phase1Outcome> outs{solve_noncooperative(sc1, cfg.solve),
                                    solve_constant_accel(sc1),
                                    solve_cooperative(sc1, cfg.solve)};
    const auto best = select_phase1(outs);
    if (phase1_outcomes) *phase1_outcomes = outs;
    if (!best) return infeasible_report(MergePolicy::AheadOfHdv);
    p1 = *best;
    p1_policy = p1.policy;
  }

  const IbrResult ibr = run_ibr(cfg.phase2(p1), cfg.ibr);
  if (!ibr.feasible) return infeasible_report(MergePolicy::AheadOfHdv);

  PolicyReport r;
  r.policy = MergePolicy::AheadOfHdv;
  r.feasible = true;
  r.phase1_policy = p1_policy;
  r.t1 = p1.t1;
  r.t_f = ibr.t_f_star;
  r.maneuver_time = ibr.t_f_star - cfg.t0;
  r.cost_C = p1.cost + ibr.J_C_II;
  r.cost_1 = ibr.J_1_II;
  r.cost_H = ibr.J_H_II;
  r.cost_total = r.cost_C + r.cost_1 + r.cost_H;
  r.converged = ibr.converged;
  r.ibr_rounds = ibr.rounds;
  r.ibr_restarts = ibr.restarts;
  r.traj_1 = p1.traj_1.concatenated(ibr.traj_1);
  r.traj_C = p1.traj_C.concatenated(ibr.traj_C);
  r.traj_H = p1.traj_H.concatenated(ibr.traj_H);
  r.hdv_disruption = hdv_disruption(cfg, r.traj_H);
  return r;
}

PolicyReport evaluate_ahead_of_cav1(const ScenarioConfig& cfg) {
  cfg.validate();
  const MergeAheadResult m = solve_merge_ahead_cav1(cfg.merge_ahead(), cfg.solve);
  if (!m.feasible()) return infeasible_report(MergePolicy::AheadOfCav1);

  PolicyReport r;
  r.policy = MergePolicy::AheadOfCav1;
  r.t1 = cfg.t0;
  r.t_f = m.t_f;
  r.maneuver_time = m.t_f - cfg.t0;
  r.cost_1 = m.agent_costs[0];
  r.cost_C = m.agent_costs[1] + m.time_cost;
  r.converged = !m.used_numeric || m.numeric_status == NlpStatus::Converged;
  r.traj_1 = m.traj_1;
  r.traj_C = m.traj_C;

  // The HDV cruises unless that would close in on CAV 1; then it brakes
  // behind CAV 1 with no risk term, since C is no longer in front of it.
  const Trajectory cruise = Trajectory::constant_speed(cfg.hdv, cfg.t0, m.t_f, cfg.solve.n_nodes);
  const SafetyMargins margins =
      safety_margins(r.traj_1, r.traj_C, cruise, cfg.safety, m.t_f, MergeSlot::AheadOfCav1);
  const double v_dH = cfg.hdv_profile.desired_speed(cfg.hdv);
  if (margins.rear_end >= -kSafetyTolerance) {
    r.traj_H = cruise;
    const double dv = cfg.hdv.v - v_dH;
    r.cost_H = cfg.hdv_profile.beta_v / cfg.scaling.speed * dv * dv * (m.t_f - cfg.t0);
  } else {
    HdvProfile follower = cfg.hdv_profile;
    follower.beta_s = 0.0;
    follower.v_d_H = v_dH;
    const NlpSolution h = solve_hdv_response(r.traj_C, r.traj_1, cfg.hdv, follower, cfg.t0,
                                             m.t_f, cfg.safety, cfg.limits, cfg.scaling,
                                             cfg.solve);
    if (!h.usable()) return infeasible_report(MergePolicy::AheadOfCav1);
    r.traj_H = h.trajectories[0];
    r.cost_H = h.agent_costs.at(0);
  }
  r.feasible = true;
  r.cost_total = r.cost_1 + r.cost_C + r.cost_H;
  r.hdv_disruption = hdv_disruption(cfg, r.traj_H);
  return r;
}

ScenarioReport evaluate_scenario(const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioReport rep;
  rep.name = cfg.name;
  rep.ahead_hdv = evaluate_ahead_of_hdv(cfg, &rep.phase1_outcomes);
  rep.ahead_cav1 = evaluate_ahead_of_cav1(cfg);

  const PolicyReport& h = rep.ahead_hdv;
  const PolicyReport& one = rep.ahead_cav1;
  if (h.feasible && one.feasible) {
    const bool hdv_wins =
        h.cost_total < one.cost_total ||
        (h.cost_total == one.cost_total && h.maneuver_time <= one.maneuver_time);
    rep.chosen = hdv_wins ? MergePolicy::AheadOfHdv : MergePolicy::AheadOfCav1;
  } else if (h.feasible) {
    rep.chosen = MergePolicy::AheadOfHdv;
  } else if (one.feasible) {
    rep.chosen = MergePolicy::AheadOfCav1;
  }
  if (const PolicyReport* w = rep.winner()) {
    const MergeSlot slot = w->policy == MergePolicy::AheadOfHdv ? MergeSlot::BetweenCav1AndHdv
                                                                : MergeSlot::AheadOfCav1;
    rep.violations =
        check_safety_triplet(w->traj_1, w->traj_C, w->traj_H, cfg.safety, w->t_f,
                             kSafetyTolerance, slot);
  }
  rep.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

ScenarioConfig with_dist(const ScenarioConfig& cfg, double dist) {
  ScenarioConfig c = cfg;
  c.cav1.x = cfg.hdv.x + dist;
  return c;
}

std::vector<ScenarioReport> dist_sweep_serial(const ScenarioConfig& cfg,
                                              std::span<const double> dists) {
  std::vector<ScenarioReport> out;
  out.reserve(dists.size());
  for (double d : dists) out.push_back(evaluate_scenario(with_dist(cfg, d)));
  return out;
}

std::vector<ScenarioReport> dist_sweep(const ScenarioConfig& cfg, std::span<const double> dists) {
  std::vector<ScenarioReport> out(dists.size());
  parallel_for(static_cast<int>(dists.size()),
               [&](int i) { out[i] = evaluate_scenario(with_dist(cfg, dists[i])); });
  return out;
}

std::string to_string(StudyAxis a) {
  switch (a) {
    case StudyAxis::BetaS: return "beta_s";
    case StudyAxis::DesiredSpeedH: return "vdh";
    case StudyAxis::Mu: return "mu";
  }
  return "unknown";
}

std::optional<StudyAxis> parse_study_axis(const std::string& s) {
  if (s == "beta_s") return StudyAxis::BetaS;
  if (s == "vdh") return StudyAxis::DesiredSpeedH;
  if (s == "mu") return StudyAxis::Mu;
  return std::nullopt;
}

ScenarioConfig with_axis_value(const ScenarioConfig& cfg, StudyAxis axis, double value) {
  ScenarioConfig c = cfg;
  switch (axis) {
    case StudyAxis::BetaS: c.hdv_profile.beta_s = value; break;
    case StudyAxis::DesiredSpeedH: c.hdv_profile.v_d_H = value; break;
    case StudyAxis::Mu: c.hdv_profile.mu = value; break;
  }
  return c;
}

std::vector<StudyRow> parameter_study(const ScenarioConfig& cfg, StudyAxis axis,
                                      std::span<const double> values,
                                      std::span<const double> dists) {
  std::vector<StudyRow> rows;
  rows.reserve(values.size() * dists.size());
  for (double v : values) {
    for (double d : dists) rows.push_back({v, d, {}});
  }
  parallel_for(static_cast<int>(rows.size()), [&](int i) {
    rows[i].report = evaluate_scenario(with_dist(with_axis_value(cfg, axis, rows[i].value),
                                                 rows[i].dist));
  });
  return rows;
}

std::optional<double> switch_threshold(std::span<const double> dists,
                                       std::span<const ScenarioReport> reports) {
  if (dists.size() != reports.size()) {
    throw std::invalid_argument("switch_threshold: size mismatch");
  }
  for (std::size_t i = 0; i < dists.size(); ++i) {
    if (reports[i].chosen == MergePolicy::AheadOfHdv) return dists[i];
  }
  return std::nullopt;
}

}  // namespace lanechange
