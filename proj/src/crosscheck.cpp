#include "lanechange/crosscheck.hpp"

#include <cmath>
#include <random>

namespace lanechange {

OcpSpec shrunken_catchup_spec(std::uint64_t seed, bool cooperative) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  const double v_C = uniform(20.0, 24.0);
  const double v_H = uniform(v_C - 2.0, v_C + 2.0);
  const double gap = uniform(2.0, 8.0);
  const double alpha_t = uniform(0.3, 0.8);

  OcpSpec spec = OcpSpec::with_free_horizon(0.0, 0.05, 6.0);
  spec.time_weight = alpha_t;
  auto agent = [&](VehicleState init) {
    AgentSpec a;
    a.init = init;
    a.effort_weight = 0.2 / 10.89;
    a.terminal_speed_weight = 0.25 / 12.5;
    a.terminal_speed_target = 30.0;
    return a;
  };
  if (!cooperative) {
    spec.agents.push_back(agent({0.0, v_C}));
    // x_C(t_f) = gap + v_H t_f
    spec.terminal.push_back({{{0, StateVar::X, 1.0}}, -v_H, -gap, ConstraintKind::Equal});
    return spec;
  }
  const double v_1 = uniform(24.0, 28.0);
  const double lead = uniform(gap + 8.0, gap + 14.0);
  spec.agents.push_back(agent({lead, v_1}));
  spec.agents.push_back(agent({0.0, v_C}));
  const SafetyParams p;
  // x_1(t_f) = x_C(t_f) + phi v_H + delta
  spec.terminal.push_back({{{0, StateVar::X, 1.0}, {1, StateVar::X, -1.0}},
                           0.0,
                           -(p.phi * v_H + p.delta),
                           ConstraintKind::Equal});
  return spec;
}

bool CrossCheckCase::dominates(double rel_tol) const {
  if (!std::isfinite(oracle_objective)) return true;
  if (!std::isfinite(solver_objective)) return false;
  return solver_objective <= oracle_objective + rel_tol * std::abs(oracle_objective);
}

std::vector<CrossCheckCase> oracle_crosscheck(std::uint64_t seed, int count, int segments,
                                              int n_nodes, const NlpOptions& nlp) {
  std::vector<CrossCheckCase> out;
  for (int i = 0; i < count; ++i) {
    CrossCheckCase c;
    c.seed = seed + static_cast<std::uint64_t>(i);
    c.cooperative = (c.seed % 2) == 1;
    const OcpSpec spec = shrunken_catchup_spec(c.seed, c.cooperative);

    OracleOptions oo;
    oo.segments = segments;
    oo.n_nodes = n_nodes;
    const VehicleLimits lim;
    const int levels = c.cooperative ? 5 : 9;
    for (int k = 0; k < levels; ++k) {
      oo.levels.push_back(lim.u_min + (lim.u_max - lim.u_min) * k / (levels - 1));
    }
    const OracleResult o = brute_force_oracle(spec, oo);
    c.oracle_objective = o.objective;
    c.oracle_t_f = o.t_f;

    OcpSolveOptions so;
    so.n_nodes = n_nodes;
    so.nlp = nlp;
    const NlpSolution s = solve_ocp(spec, so);
    c.status = s.status;
    c.solver_objective = s.usable() ? s.objective : INFINITY;
    c.solver_t_f = s.t_f;
    out.push_back(c);
  }
  return out;
}

}  // namespace lanechange
