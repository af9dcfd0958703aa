#pragma once

#include <optional>
#include <span>
#include <string>

#include "lanechange/hdv.hpp"
#include "lanechange/ocp_solver.hpp"
#include "lanechange/trajectory.hpp"
#include "lanechange/vehicle.hpp"
#include "lanechange/weights.hpp"

namespace lanechange {

enum class Phase1Policy { Noncooperative, ConstantAccel, Cooperative };

std::string to_string(Phase1Policy p);

/// Catch-up problem: CAV C in the slow lane behind the HDV, CAV 1 ahead of
/// the HDV in the target lane.
struct Phase1Scenario {
  double t0 = 0.0;
  VehicleState cav1;
  VehicleState cavC;
  VehicleState hdv;
  VehicleLimits limits;
  SafetyParams safety;
  CostWeights weights;
  CostScaling scaling;
  HdvProfile hdv_profile;  // used to synthesize the HDV reply to cooperation
  double v_d_1 = 30.0;
  double v_d_C = 30.0;
  /// Target of the terminal speed term of the single-vehicle catch-up cost.
  /// Defaults to v_d_1 as that cost is written.
  std::optional<double> catchup_speed_target;
  double T = 15.0;
  /// Minimum duration of a free-time catch-up problem.
  double min_duration = 0.05;

  double catchup_target() const { return catchup_speed_target.value_or(v_d_1); }
  void validate() const;
};

struct Phase1Outcome {
  Phase1Policy policy = Phase1Policy::Noncooperative;
  double cost = 0.0;  // +inf when the policy is infeasible
  double t1 = 0.0;
  Trajectory traj_C;
  Trajectory traj_1;  // constant speed unless the policy is cooperative
  Trajectory traj_H;
  NlpStatus status = NlpStatus::Converged;

  bool feasible() const;
  VehicleState cavC_at_t1() const { return traj_C.state_at(t1); }
  VehicleState cav1_at_t1() const { return traj_1.state_at(t1); }
  VehicleState hdv_at_t1() const { return traj_H.state_at(t1); }
};

/// Free-time single-vehicle catch-up with the HDV assumed at constant speed.
Phase1Outcome solve_noncooperative(const Phase1Scenario& sc,
                                   const OcpSolveOptions& opts = {});

/// Full-throttle catch-up (coasting once v_max is reached); closed form.
Phase1Outcome solve_constant_accel(const Phase1Scenario& sc);

/// Joint free-time problem where CAV 1 slows down so that the HDV must open a
/// gap for C. The HDV trajectory is synthesized as its best response under
/// the car-following constraint to CAV 1 (no risk term).
Phase1Outcome solve_cooperative(const Phase1Scenario& sc,
                                const OcpSolveOptions& opts = {});

/// Minimum-cost outcome; ties go to the smaller t1, then to policy order.
/// Returns std::nullopt when every outcome is infeasible.
std::optional<Phase1Outcome> select_phase1(std::span<const Phase1Outcome> outcomes);

/// Smallest t >= 0 with rel_speed t + accel t^2 / 2 = gap (accel >= 0), or
/// nullopt when the gap is never closed.
std::optional<double> first_catchup_time(double gap, double rel_speed, double accel);

}  // namespace lanechange
