#include "lanechange/ocp_solver.hpp"

#include <limits>
#include <stdexcept>

#include "lanechange/transcription.hpp"

namespace lanechange {

namespace {

NlpSolution run(const Transcription& tr, const Eigen::VectorXd& z0,
                const NlpOptions& opts, const Eigen::VectorXd* mult0) {
  NlpSolution sol;
  if (tr.initial_path_violation() > opts.feasibility_tol) {
    sol.status = NlpStatus::Infeasible;
    sol.objective = std::numeric_limits<double>::infinity();
    sol.violation = tr.initial_path_violation();
    sol.z = z0;
    sol.trajectories = tr.unpack(z0);
    sol.t_f = tr.final_time(z0);
    return sol;
  }
  NlpResult r = solve_nlp(tr, z0, opts, mult0);
  sol.status = r.status;
  sol.violation = r.violation;
  sol.stationarity = r.stationarity;
  sol.outer_iterations = r.outer_iterations;
  sol.inner_iterations = r.inner_iterations;
  sol.z = r.z;
  sol.multipliers = r.multipliers;
  sol.t_f = tr.final_time(r.z);
  sol.trajectories = tr.unpack(r.z);
  sol.time_cost = tr.time_cost(r.z);
  for (int a = 0; a < tr.num_agents(); ++a) sol.agent_costs.push_back(tr.agent_cost(r.z, a));
  for (int row : tr.terminal_rows()) sol.terminal_multipliers.push_back(r.multipliers[row]);
  const bool feasible = r.status == NlpStatus::Converged || r.status == NlpStatus::MaxIterations;
  sol.objective = feasible ? r.objective : std::numeric_limits<double>::infinity();
  return sol;
}

Eigen::VectorXd start_point(const Transcription& tr, const WarmStart* warm, double t_f) {
  if (warm != nullptr && !warm->trajectories.empty()) return tr.pack(warm->trajectories, t_f);
  return tr.initial_guess(t_f);
}

const Eigen::VectorXd* warm_multipliers(const Transcription& tr, const WarmStart* warm) {
  if (warm == nullptr) return nullptr;
  const auto m = tr.num_equalities() + tr.num_inequalities();
  return warm->multipliers.size() == m ? &warm->multipliers : nullptr;
}

}  // namespace

NlpSolution solve_ocp(const OcpSpec& spec, const OcpSolveOptions& opts,
                      const WarmStart* warm) {
  if (spec.free_horizon) return solve_free_time(spec, opts, warm);
  const Transcription tr(spec, opts.n_nodes);
  const Eigen::VectorXd z0 = start_point(tr, warm, spec.fixed.t_f);
  return run(tr, z0, opts.nlp, warm_multipliers(tr, warm));
}

NlpSolution solve_free_time(const OcpSpec& spec, const OcpSolveOptions& opts,
                            const WarmStart* warm) {
  if (!spec.free_horizon) throw std::invalid_argument("solve_free_time: horizon is fixed");
  const Transcription tr(spec, opts.n_nodes);
  const double lo = spec.free.t_f_min;
  const double hi = spec.free.t_f_max;

  std::vector<double> guesses;
  if (warm != nullptr && warm->t_f > lo && warm->t_f <= hi) guesses.push_back(warm->t_f);
  guesses.push_back(0.5 * (lo + hi));
  guesses.push_back(lo + 0.25 * (hi - lo));
  guesses.push_back(lo + 0.75 * (hi - lo));

  NlpSolution best;
  bool have = false;
  for (std::size_t i = 0; i < guesses.size(); ++i) {
    const bool use_warm = i == 0 && warm != nullptr && guesses.size() == 4;
    Eigen::VectorXd z0 = start_point(tr, use_warm ? warm : nullptr, guesses[i]);
    Eigen::VectorXd mult;
    const Eigen::VectorXd* mult0 = use_warm ? warm_multipliers(tr, warm) : nullptr;
    if (mult0 == nullptr) {
      // The fixed-horizon problem is convex; its solution seeds the coupled one.
      OcpSpec fixed = spec;
      fixed.free_horizon = false;
      fixed.fixed.t_f = guesses[i];
      const Transcription tf_fixed(fixed, opts.n_nodes);
      const NlpResult seed = solve_nlp(tf_fixed, z0.head(tf_fixed.num_variables()), opts.nlp);
      z0.head(tf_fixed.num_variables()) = seed.z;
      mult = Eigen::VectorXd::Zero(tr.num_equalities() + tr.num_inequalities());
      mult.head(seed.multipliers.size()) = seed.multipliers;
      mult0 = &mult;
    }
    NlpSolution sol = run(tr, z0, opts.nlp, mult0);
    if (!have || (sol.converged() && !best.converged()) ||
        (sol.converged() == best.converged() && sol.objective < best.objective)) {
      best = std::move(sol);
      have = true;
    }
    if (best.converged()) break;
  }
  return best;
}

}  // namespace lanechange
