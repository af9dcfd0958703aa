#pragma once

#include <vector>

#include <Eigen/Core>

#include "lanechange/nlp_solver.hpp"
#include "lanechange/ocp.hpp"
#include "lanechange/trajectory.hpp"

namespace lanechange {

struct OcpSolveOptions {
  int n_nodes = 101;
  NlpOptions nlp;
};

/// Warm start for a transcribed solve. Trajectories are resampled on the new
/// grid; multipliers are reused only when the problem size matches.
struct WarmStart {
  std::vector<Trajectory> trajectories;
  double t_f = 0.0;
  Eigen::VectorXd multipliers;
};

struct NlpSolution {
  std::vector<Trajectory> trajectories;  // one per agent, spec order
  double objective = 0.0;                // +inf unless a feasible point was found
  double t_f = 0.0;
  double time_cost = 0.0;
  std::vector<double> agent_costs;
  std::vector<double> terminal_multipliers;  // >= 0 for inequalities
  NlpStatus status = NlpStatus::MaxIterations;
  double violation = 0.0;
  double stationarity = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  Eigen::VectorXd z;
  Eigen::VectorXd multipliers;

  bool converged() const { return status == NlpStatus::Converged; }
  /// Converged, or stopped on iterations at a point within the feasibility tolerance.
  bool usable() const {
    return status == NlpStatus::Converged || status == NlpStatus::MaxIterations;
  }
  WarmStart warm_start() const { return {trajectories, t_f, multipliers}; }
};

/// Transcribes and solves an OCP with either horizon type.
NlpSolution solve_ocp(const OcpSpec& spec, const OcpSolveOptions& opts = {},
                      const WarmStart* warm = nullptr);

/// Free-final-time solve. Starts from t_f at the midpoint of its bounds (or the
/// warm start) and retries from the quartiles before declaring failure.
/// Infeasible means no t_f within the bounds admits a feasible trajectory.
NlpSolution solve_free_time(const OcpSpec& spec, const OcpSolveOptions& opts = {},
                            const WarmStart* warm = nullptr);

}  // namespace lanechange
