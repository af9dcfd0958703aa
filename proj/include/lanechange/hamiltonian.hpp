#pragma once

#include <array>
#include <optional>

#include "lanechange/ocp_solver.hpp"
#include "lanechange/trajectory.hpp"
#include "lanechange/vehicle.hpp"
#include "lanechange/weights.hpp"

namespace lanechange {

/// Joint problem of CAV C overtaking CAV 1 in the target lane:
///
///   min int [alpha_u/2 (u_1^2 + u_C^2) + alpha_t] dt
///       + alpha_v/2 [(v_C(t_f) - v_dC)^2 + (v_1(t_f) - v_d1)^2]
///   s.t. x_C(t_f) - x_1(t_f) = phi v_1(t_f) + delta,
///
/// with alpha_u and alpha_v divided by the cost scaling.
struct MergeAheadProblem {
  double t0 = 0.0;
  VehicleState cav1;
  VehicleState cavC;
  CostWeights weights;
  CostScaling scaling;
  double v_d_1 = 30.0;
  double v_d_C = 30.0;
  SafetyParams safety;
  VehicleLimits limits;
  double T = 15.0;             // cap on t_f for the numeric fallback
  double min_duration = 0.05;

  double alpha_u() const { return weights.alpha_u / scaling.effort; }
  double alpha_v() const { return weights.alpha_v / scaling.speed; }
  void validate() const;
};

/// Closed-form extremal with bound constraints inactive. Time is measured
/// from t0: with tau = t - t0, u_i = (a_i tau + b_i) / alpha_u and v_i, x_i are
/// its first and second integrals with constants c_i / alpha_u, d_i / alpha_u.
struct PolynomialSolution {
  double a_1 = 0.0, b_1 = 0.0, c_1 = 0.0, d_1 = 0.0;
  double a_C = 0.0, b_C = 0.0, c_C = 0.0, d_C = 0.0;
  double t0 = 0.0;
  double t_f = 0.0;
  double nu = 0.0;
  double alpha_u = 1.0;
};

struct PolynomialState {
  double x_1, v_1, u_1;
  double x_C, v_C, u_C;
};

struct Costates {
  double lx_1, lv_1, lx_C, lv_C;
};

/// Throws std::out_of_range outside [t0, t_f].
PolynomialState eval_polynomial(const PolynomialSolution& sol, double t);
Costates costates(const PolynomialSolution& sol, double t);
/// Hamiltonian along the extremal; constant in t for an exact solution.
double hamiltonian(const PolynomialSolution& sol, const MergeAheadProblem& pb, double t);

/// Optimality system: multiplier links (2), terminal costate conditions (2),
/// initial conditions (4), the terminal merge gap, and the transversality
/// condition; element 10 is |H(t_f)|.
std::array<double, 11> residuals(const PolynomialSolution& sol, const MergeAheadProblem& pb);

/// Objective evaluated in closed form on the polynomial trajectories.
double polynomial_objective(const PolynomialSolution& sol, const MergeAheadProblem& pb);

struct MergeAheadResult {
  PolynomialSolution poly;
  bool analytic_converged = false;
  bool bounds_inactive = false;  // speed and control bounds slack on 201 points
  bool used_numeric = false;
  double objective = 0.0;        // +inf when neither route produced a solution
  double t_f = 0.0;
  double time_cost = 0.0;
  std::array<double, 2> agent_costs{};  // effort plus terminal speed, CAV 1 then C
  Trajectory traj_1;
  Trajectory traj_C;
  NlpStatus numeric_status = NlpStatus::Converged;
  int newton_iterations = 0;

  bool feasible() const;
};

/// Newton solve of the optimality system. Seeds come from the affine system
/// at fixed t_f (kinematic overtaking time, jittered 0.5x to 2x); if none
/// converges, a log-spaced scan of the transversality residual over t_f is
/// bisected at every sign change and polished. The cheapest root with a
/// positive duration wins; nullopt when there is none.
std::optional<PolynomialSolution> solve_polynomial(const MergeAheadProblem& pb,
                                                   int* iterations = nullptr);

/// True when u and v stay within bounds (tolerance 1e-9) on 201 uniform points.
bool bounds_inactive(const PolynomialSolution& sol, const VehicleLimits& limits);

/// Analytic solution when valid, otherwise the transcribed problem.
MergeAheadResult solve_merge_ahead_cav1(const MergeAheadProblem& pb,
                                        const OcpSolveOptions& opts = {});

/// The same problem transcribed and solved numerically (always).
NlpSolution solve_merge_ahead_numeric(const MergeAheadProblem& pb,
                                      const OcpSolveOptions& opts = {},
                                      bool enforce_bounds = true);

/// Samples the polynomial trajectories on n uniform nodes.
std::array<Trajectory, 2> polynomial_trajectories(const PolynomialSolution& sol, int n);

}  // namespace lanechange
