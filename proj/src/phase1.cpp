#include "lanechange/phase1.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lanechange {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int policy_rank(Phase1Policy p) { return static_cast<int>(p); }

// Outcome for C already level with (or ahead of) the HDV: no Phase I.
Phase1Outcome immediate(const Phase1Scenario& sc, Phase1Policy policy) {
  Phase1Outcome out;
  out.policy = policy;
  out.cost = 0.0;
  out.t1 = sc.t0;
  out.traj_C = Trajectory({{sc.t0, sc.cavC.x, sc.cavC.v, 0.0}});
  out.traj_1 = Trajectory({{sc.t0, sc.cav1.x, sc.cav1.v, 0.0}});
  out.traj_H = Trajectory({{sc.t0, sc.hdv.x, sc.hdv.v, 0.0}});
  return out;
}

Phase1Outcome infeasible(const Phase1Scenario& sc, Phase1Policy policy, NlpStatus status) {
  Phase1Outcome out = immediate(sc, policy);
  out.cost = kInf;
  out.status = status;
  return out;
}

AgentSpec cav_agent(const Phase1Scenario& sc, const VehicleState& init, double v_target) {
  AgentSpec a;
  a.init = init;
  a.limits = sc.limits;
  a.effort_weight = sc.weights.alpha_u / sc.scaling.effort;
  a.terminal_speed_weight = sc.weights.alpha_v / sc.scaling.speed;
  a.terminal_speed_target = v_target;
  return a;
}

bool already_level(const Phase1Scenario& sc) { return sc.cavC.x >= sc.hdv.x; }

}  // namespace

std::string to_string(Phase1Policy p) {
  switch (p) {
    case Phase1Policy::Noncooperative: return "noncooperative";
    case Phase1Policy::ConstantAccel: return "constant-accel";
    case Phase1Policy::Cooperative: return "cooperative";
  }
  return "unknown";
}

void Phase1Scenario::validate() const {
  limits.validate();
  safety.validate();
  weights.validate();
  scaling.validate();
  hdv_profile.validate();
  for (const auto* s : {&cav1, &cavC, &hdv}) {
    if (!std::isfinite(s->x) || !std::isfinite(s->v) || s->v < 0.0) {
      throw std::invalid_argument("Phase1Scenario: invalid vehicle state");
    }
  }
  if (!(T > t0)) throw std::invalid_argument("Phase1Scenario: T must exceed t0");
  if (!(min_duration > 0.0 && t0 + min_duration <= T)) {
    throw std::invalid_argument("Phase1Scenario: invalid minimum duration");
  }
}

bool Phase1Outcome::feasible() const { return std::isfinite(cost); }

std::optional<double> first_catchup_time(double gap, double rel_speed, double accel) {
  if (gap <= 0.0) return 0.0;
  if (accel == 0.0) {
    if (rel_speed <= 0.0) return std::nullopt;
    return gap / rel_speed;
  }
  // accel t^2 / 2 + rel_speed t - gap = 0 has exactly one positive root
  const double disc = rel_speed * rel_speed + 2.0 * accel * gap;
  // stable form of (-b + sqrt(disc)) / a
  const double root = rel_speed >= 0.0 ? 2.0 * gap / (rel_speed + std::sqrt(disc))
                                       : (-rel_speed + std::sqrt(disc)) / accel;
  return root;
}

Phase1Outcome solve_constant_accel(const Phase1Scenario& sc) {
  sc.validate();
  if (already_level(sc)) return immediate(sc, Phase1Policy::ConstantAccel);
  const double gap = sc.hdv.x - sc.cavC.x;
  const double u = sc.limits.u_max;
  const double v_cap = sc.limits.v_max;

  double t_accel = 0.0;  // duration at full throttle
  double tau = 0.0;      // catch-up duration
  if (sc.cavC.v < v_cap) {
    const double t_sat = (v_cap - sc.cavC.v) / u;
    const auto t_hit = first_catchup_time(gap, sc.cavC.v - sc.hdv.v, u);
    if (t_hit && *t_hit <= t_sat) {
      t_accel = tau = *t_hit;
    } else {
      const double closed = (sc.cavC.v - sc.hdv.v) * t_sat + 0.5 * u * t_sat * t_sat;
      const auto t_cruise = first_catchup_time(gap - closed, v_cap - sc.hdv.v, 0.0);
      if (!t_cruise) return infeasible(sc, Phase1Policy::ConstantAccel, NlpStatus::Infeasible);
      t_accel = t_sat;
      tau = t_sat + *t_cruise;
    }
  } else {
    const auto t_cruise = first_catchup_time(gap, sc.cavC.v - sc.hdv.v, 0.0);
    if (!t_cruise) return infeasible(sc, Phase1Policy::ConstantAccel, NlpStatus::Infeasible);
    tau = *t_cruise;
  }
  const double t1 = sc.t0 + tau;
  if (t1 > sc.T) return infeasible(sc, Phase1Policy::ConstantAccel, NlpStatus::Infeasible);

  std::vector<double> times{sc.t0};
  std::vector<double> controls;
  if (t_accel > 0.0) {
    times.push_back(sc.t0 + t_accel);
    controls.push_back(u);
  }
  if (tau > t_accel) {
    times.push_back(t1);
    controls.push_back(0.0);
  }

  Phase1Outcome out;
  out.policy = Phase1Policy::ConstantAccel;
  out.t1 = t1;
  out.traj_C = Trajectory::from_controls(sc.cavC, times, controls);
  out.traj_1 = Trajectory::constant_speed(sc.cav1, sc.t0, t1, 2);
  out.traj_H = Trajectory::constant_speed(sc.hdv, sc.t0, t1, 2);
  const double v_end = out.traj_C.back().v;
  const double ev = v_end - sc.catchup_target();
  out.cost = sc.weights.alpha_t * tau +
             0.5 * sc.weights.alpha_u / sc.scaling.effort * u * u * t_accel +
             sc.weights.alpha_v / sc.scaling.speed * ev * ev;
  return out;
}

Phase1Outcome solve_noncooperative(const Phase1Scenario& sc, const OcpSolveOptions& opts) {
  sc.validate();
  if (already_level(sc)) return immediate(sc, Phase1Policy::Noncooperative);
  OcpSpec spec = OcpSpec::with_free_horizon(sc.t0, sc.t0 + sc.min_duration, sc.T);
  spec.time_weight = sc.weights.alpha_t;
  spec.agents.push_back(cav_agent(sc, sc.cavC, sc.catchup_target()));
  // x_C(t1) = x_H(t0) + v_H(t0) (t1 - t0)
  spec.terminal.push_back({{{0, StateVar::X, 1.0}},
                           -sc.hdv.v,
                           -(sc.hdv.x - sc.hdv.v * sc.t0),
                           ConstraintKind::Equal});
  const NlpSolution sol = solve_free_time(spec, opts);
  if (!sol.usable()) return infeasible(sc, Phase1Policy::Noncooperative, sol.status);

  Phase1Outcome out;
  out.policy = Phase1Policy::Noncooperative;
  out.status = sol.status;
  out.cost = sol.objective;
  out.t1 = sol.t_f;
  out.traj_C = sol.trajectories[0];
  out.traj_1 = Trajectory::constant_speed(sc.cav1, sc.t0, out.t1, opts.n_nodes);
  out.traj_H = Trajectory::constant_speed(sc.hdv, sc.t0, out.t1, opts.n_nodes);
  return out;
}

Phase1Outcome solve_cooperative(const Phase1Scenario& sc, const OcpSolveOptions& opts) {
  sc.validate();
  if (already_level(sc)) return immediate(sc, Phase1Policy::Cooperative);
  OcpSpec spec = OcpSpec::with_free_horizon(sc.t0, sc.t0 + sc.min_duration, sc.T);
  spec.time_weight = sc.weights.alpha_t;
  spec.agents.push_back(cav_agent(sc, sc.cav1, sc.v_d_1));
  spec.agents.push_back(cav_agent(sc, sc.cavC, sc.v_d_C));
  // x_1(t1) = x_C(t1) + phi v_H(t0) + delta
  spec.terminal.push_back({{{0, StateVar::X, 1.0}, {1, StateVar::X, -1.0}},
                           0.0,
                           -(sc.safety.phi * sc.hdv.v + sc.safety.delta),
                           ConstraintKind::Equal});
  const NlpSolution sol = solve_free_time(spec, opts);
  if (!sol.usable()) return infeasible(sc, Phase1Policy::Cooperative, sol.status);

  Phase1Outcome out;
  out.policy = Phase1Policy::Cooperative;
  out.status = sol.status;
  out.cost = sol.objective;
  out.t1 = sol.t_f;
  out.traj_1 = sol.trajectories[0];
  out.traj_C = sol.trajectories[1];

  HdvProfile follower = sc.hdv_profile;
  follower.beta_s = 0.0;
  const NlpSolution h = solve_hdv_response(out.traj_C, out.traj_1, sc.hdv, follower, sc.t0,
                                           out.t1, sc.safety, sc.limits, sc.scaling, opts);
  out.traj_H = h.usable() ? h.trajectories[0]
                          : Trajectory::constant_speed(sc.hdv, sc.t0, out.t1, opts.n_nodes);
  return out;
}

std::optional<Phase1Outcome> select_phase1(std::span<const Phase1Outcome> outcomes) {
  const Phase1Outcome* best = nullptr;
  for (const auto& o : outcomes) {
    if (!o.feasible()) continue;
    if (best == nullptr || o.cost < best->cost ||
        (o.cost == best->cost &&
         (o.t1 < best->t1 ||
          (o.t1 == best->t1 && policy_rank(o.policy) < policy_rank(best->policy))))) {
      best = &o;
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

}  // namespace lanechange
