#pragma once

#include <vector>

#include "lanechange/hdv.hpp"
#include "lanechange/ocp_solver.hpp"
#include "lanechange/phase1.hpp"
#include "lanechange/trajectory.hpp"
#include "lanechange/vehicle.hpp"
#include "lanechange/weights.hpp"

namespace lanechange {

/// Parameters of the iterated best response loop.
struct IbrConfig {
  int N = 5;               // rounds per horizon
  double epsilon = 1e-6;   // L2 change of u_C between rounds, m/s^2 * sqrt(s)
  double lambda = 1.8;     // horizon relaxation factor
  double T = 15.0;         // hard cap on t_f
  bool jacobi = false;     // CAV 1 answers the previous-round C instead of the new one

  void validate() const;
};

/// Phase II data shared by every sub-problem: states at t1 and the cost model.
struct Phase2Setup {
  double t1 = 0.0;
  VehicleState cav1;
  VehicleState cavC;
  VehicleState hdv;
  VehicleLimits limits;
  SafetyParams safety;
  CostWeights weights;
  CostScaling scaling;
  HdvProfile hdv_profile;
  double v_d_1 = 30.0;
  double v_d_C = 30.0;
  double min_duration = 0.05;
  /// Charge alpha_t (t_f - t1) to CAV C's Phase II cost.
  bool time_in_phase2_cost = true;
  OcpSolveOptions solve;

  void validate() const;
};

struct IbrResult {
  bool feasible = false;  // false when no horizon up to T produced responses
  bool converged = false;
  int rounds = 0;         // best-response rounds in the final horizon
  int restarts = 0;       // horizon relaxations
  double t_f_star = 0.0;
  Trajectory traj_1;
  Trajectory traj_C;
  Trajectory traj_H;
  double J_C_II = 0.0;
  double J_1_II = 0.0;
  double J_H_II = 0.0;
  std::vector<double> control_change;  // one entry per round, all horizons
  NlpStatus last_status = NlpStatus::Converged;
};

/// C's Phase II problem with the HDV assumed at constant speed, free t_f in
/// [t1 + min_duration, T].
NlpSolution solve_ideal_phase2(const Phase2Setup& s, double T);

/// C's best response at fixed t_f: reach at least the following distance
/// ahead of the HDV's terminal state.
NlpSolution solve_cavC_response(const Phase2Setup& s, const VehicleState& hdv_terminal,
                                double t_f, const WarmStart* warm = nullptr);

/// CAV 1's best response at fixed t_f: stay the following distance ahead of
/// C's terminal state.
NlpSolution solve_cav1_response(const Phase2Setup& s, const VehicleState& cavC_terminal,
                                double t_f, const WarmStart* warm = nullptr);

/// Discrete L2 distance of two control profiles on the same grid, scaled by sqrt(h).
double control_distance(const Trajectory& a, const Trajectory& b);

/// Iterated best response H -> C -> 1 with horizon relaxation.
IbrResult run_ibr(const Phase2Setup& s, const IbrConfig& cfg);

/// Phase I cost plus C's Phase II cost; +inf if either phase failed.
double cost_merge_ahead_hdv(const Phase1Outcome& phase1, const IbrResult& ibr);

}  // namespace lanechange
