#include "lanechange/ibr.hpp"

#include "lanechange/safety.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lanechange {

namespace {

AgentSpec cav_agent(const Phase2Setup& s, const VehicleState& init, double v_target) {
  AgentSpec a;
  a.init = init;
  a.limits = s.limits;
  a.effort_weight = s.weights.alpha_u / s.scaling.effort;
  a.terminal_speed_weight = s.weights.alpha_v / s.scaling.speed;
  a.terminal_speed_target = v_target;
  return a;
}

double cavC_phase2_cost(const Phase2Setup& s, const NlpSolution& sol) {
  double J = sol.agent_costs.at(0);
  if (s.time_in_phase2_cost) J += s.weights.alpha_t * (sol.t_f - s.t1);
  return J;
}

// C's problem at a fixed horizon against a constant-speed HDV.
NlpSolution ideal_fixed(const Phase2Setup& s, double t_f) {
  const VehicleState h{s.hdv.x + s.hdv.v * (t_f - s.t1), s.hdv.v};
  return solve_cavC_response(s, h, t_f);
}

}  // namespace

void IbrConfig::validate() const {
  if (N < 1) throw std::invalid_argument("IbrConfig: N must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("IbrConfig: epsilon must be > 0");
  if (!(lambda > 1.0)) throw std::invalid_argument("IbrConfig: lambda must be > 1");
  if (!(T > 0.0)) throw std::invalid_argument("IbrConfig: T must be > 0");
}

void Phase2Setup::validate() const {
  limits.validate();
  safety.validate();
  weights.validate();
  scaling.validate();
  hdv_profile.validate();
  if (!(min_duration > 0.0)) throw std::invalid_argument("Phase2Setup: min_duration <= 0");
}

NlpSolution solve_ideal_phase2(const Phase2Setup& s, double T) {
  s.validate();
  if (!(T >= s.t1 + s.min_duration)) {
    NlpSolution none;
    none.status = NlpStatus::Infeasible;
    none.objective = std::numeric_limits<double>::infinity();
    return none;
  }
  OcpSpec spec = OcpSpec::with_free_horizon(s.t1, s.t1 + s.min_duration, T);
  spec.time_weight = s.weights.alpha_t;
  spec.agents.push_back(cav_agent(s, s.cavC, s.v_d_C));
  // x_C(tf) >= x_H(t1) + v_H(t1)(tf - t1) + phi v_H(t1) + delta
  spec.terminal.push_back({{{0, StateVar::X, 1.0}},
                           -s.hdv.v,
                           -(s.hdv.x - s.hdv.v * s.t1 + s.safety.phi * s.hdv.v + s.safety.delta),
                           ConstraintKind::GreaterEqual});
  return solve_free_time(spec, s.solve);
}

NlpSolution solve_cavC_response(const Phase2Setup& s, const VehicleState& hdv_terminal,
                                double t_f, const WarmStart* warm) {
  OcpSpec spec = OcpSpec::with_fixed_horizon(s.t1, t_f);
  spec.agents.push_back(cav_agent(s, s.cavC, s.v_d_C));
  // x_C(tf) >= x_H*(tf) + phi v_H*(tf) + delta
  spec.terminal.push_back({{{0, StateVar::X, 1.0}},
                           0.0,
                           -(hdv_terminal.x + s.safety.phi * hdv_terminal.v + s.safety.delta),
                           ConstraintKind::GreaterEqual});
  return solve_ocp(spec, s.solve, warm);
}

NlpSolution solve_cav1_response(const Phase2Setup& s, const VehicleState& cavC_terminal,
                                double t_f, const WarmStart* warm) {
  OcpSpec spec = OcpSpec::with_fixed_horizon(s.t1, t_f);
  spec.agents.push_back(cav_agent(s, s.cav1, s.v_d_1));
  // x_1(tf) >= x_C*(tf) + phi v_C*(tf) + delta
  spec.terminal.push_back({{{0, StateVar::X, 1.0}},
                           0.0,
                           -(cavC_terminal.x + s.safety.phi * cavC_terminal.v + s.safety.delta),
                           ConstraintKind::GreaterEqual});
  return solve_ocp(spec, s.solve, warm);
}

double control_distance(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("control_distance: trajectories on different grids");
  }
  const auto sa = a.samples();
  const auto sb = b.samples();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < sa.size(); ++k) {
    const double h = sa[k + 1].t - sa[k].t;
    const double du = sa[k].u - sb[k].u;
    acc += du * du * h;
  }
  return std::sqrt(acc);
}

IbrResult run_ibr(const Phase2Setup& s, const IbrConfig& cfg) {
  s.validate();
  cfg.validate();
  IbrResult res;

  const double initial_gap =
      s.cav1.x - s.hdv.x - (s.safety.phi * s.hdv.v + s.safety.delta);
  if (initial_gap < -kSafetyTolerance) {
    res.last_status = NlpStatus::Infeasible;
    return res;
  }

  NlpSolution c_sol = solve_ideal_phase2(s, cfg.T);
  if (!c_sol.usable()) {
    res.last_status = c_sol.status;
    return res;
  }
  double t_f = c_sol.t_f;
  const int nodes = s.solve.n_nodes;

  while (t_f <= cfg.T + 1e-12) {
    Trajectory traj_C = c_sol.trajectories[0];
    Trajectory traj_1 = Trajectory::constant_speed(s.cav1, s.t1, t_f, nodes);
    NlpSolution h_sol;
    NlpSolution one_sol;
    bool have_round = false;
    bool failed = false;
    bool converged = false;
    double last_change = std::numeric_limits<double>::infinity();
    int rounds = 0;

    for (int k = 1; k <= cfg.N; ++k) {
      const WarmStart wh = h_sol.warm_start();
      h_sol = solve_hdv_response(traj_C, traj_1, s.hdv, s.hdv_profile, s.t1, t_f, s.safety,
                                 s.limits, s.scaling, s.solve, k > 1 ? &wh : nullptr);
      if (!h_sol.usable()) {
        res.last_status = h_sol.status;
        failed = true;
        break;
      }
      if (k >= 2 && last_change <= cfg.epsilon) {
        converged = true;
        break;
      }
      const VehicleState h_end = h_sol.trajectories[0].state_at(t_f);
      const WarmStart wc = c_sol.warm_start();
      NlpSolution c_new = solve_cavC_response(s, h_end, t_f, &wc);
      if (!c_new.usable()) {
        res.last_status = c_new.status;
        failed = true;
        break;
      }
      const Trajectory& c_target = cfg.jacobi ? traj_C : c_new.trajectories[0];
      const VehicleState c_end = c_target.state_at(t_f);
      const WarmStart w1 = one_sol.warm_start();
      one_sol = solve_cav1_response(s, c_end, t_f, k > 1 ? &w1 : nullptr);
      if (!one_sol.usable()) {
        res.last_status = one_sol.status;
        failed = true;
        break;
      }
      last_change = control_distance(c_new.trajectories[0], traj_C);
      res.control_change.push_back(last_change);
      c_sol = std::move(c_new);
      traj_C = c_sol.trajectories[0];
      traj_1 = one_sol.trajectories[0];
      rounds = k;
      have_round = true;
    }
    if (!failed && !converged && last_change <= cfg.epsilon) {
      h_sol = solve_hdv_response(traj_C, traj_1, s.hdv, s.hdv_profile, s.t1, t_f, s.safety,
                                 s.limits, s.scaling, s.solve);
      converged = h_sol.usable();
    }
    if (have_round && h_sol.usable()) {
      res.feasible = true;
      res.converged = converged;
      res.rounds = rounds;
      res.t_f_star = t_f;
      res.traj_C = traj_C;
      res.traj_1 = traj_1;
      res.traj_H = h_sol.trajectories[0];
      res.J_C_II = cavC_phase2_cost(s, c_sol);
      res.J_1_II = one_sol.agent_costs.at(0);
      res.J_H_II = h_sol.agent_costs.at(0);
      res.last_status = c_sol.status;
    }
    if (converged) return res;

    t_f *= cfg.lambda;
    if (t_f > cfg.T + 1e-12) break;
    ++res.restarts;
    c_sol = ideal_fixed(s, t_f);
    if (!c_sol.usable()) {
      res.last_status = c_sol.status;
      break;
    }
  }
  return res;
}

double cost_merge_ahead_hdv(const Phase1Outcome& phase1, const IbrResult& ibr) {
  if (!phase1.feasible() || !ibr.feasible) return std::numeric_limits<double>::infinity();
  return phase1.cost + ibr.J_C_II;
}

}  // namespace lanechange
