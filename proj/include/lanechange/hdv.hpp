#pragma once

#include <optional>

#include "lanechange/ocp_solver.hpp"
#include "lanechange/trajectory.hpp"
#include "lanechange/vehicle.hpp"
#include "lanechange/weights.hpp"

namespace lanechange {

/// Driver model of the human-driven vehicle.
struct HdvProfile {
  double beta_u = 0.9;
  double beta_v = 0.1;
  double beta_s = 0.1;
  std::optional<double> v_d_H;  // desired speed; unset means the initial speed
  double mu = 1.0;              // risk steepness, 1/m
  double d = 0.0;               // offset of the unsafe region, m

  double desired_speed(const VehicleState& init) const { return v_d_H.value_or(init.v); }
  void validate() const;
};

/// Collision-risk value 1 / (1 + mu exp(mu (gap - d))) in (0, 1).
double sigmoid_safety(double gap, const HdvProfile& profile);

/// HDV best response on [t1, t_f] to the announced trajectories of C and 1.
///
/// Minimizes int [beta_u/2 u^2 + beta_v (v - v_dH)^2 + beta_s s(x_C* - x_H)] dt
/// subject to car-following behind CAV 1 at every node. Returns status
/// Infeasible without solving when the initial gap already violates the
/// following distance.
NlpSolution solve_hdv_response(const Trajectory& x_C_star, const Trajectory& x_1_star,
                               const VehicleState& init, const HdvProfile& profile,
                               double t1, double t_f, const SafetyParams& p,
                               const VehicleLimits& limits = {},
                               const CostScaling& scaling = {},
                               const OcpSolveOptions& opts = {},
                               const WarmStart* warm = nullptr);

}  // namespace lanechange
