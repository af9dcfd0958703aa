#pragma once

#include <optional>
#include <vector>

#include "lanechange/trajectory.hpp"
#include "lanechange/vehicle.hpp"

namespace lanechange {

/// Running penalty w * s(leader(t) - x(t)) with the logistic risk function
/// s(g) = 1 / (1 + mu * exp(mu * (g - d))). The leader is an exogenous
/// trajectory, so the penalty requires a fixed horizon.
struct SigmoidPenalty {
  double weight = 0.0;
  double mu = 1.0;
  double d = 0.0;
  Trajectory leader;
};

/// One double-integrator agent and its private cost terms.
///
/// cost_i = int (effort_weight / 2) u^2 dt
///        + int running_speed_weight (v - running_speed_target)^2 dt
///        + terminal_speed_weight (v(t_f) - terminal_speed_target)^2
///        + sigmoid penalty (optional)
struct AgentSpec {
  VehicleState init;
  VehicleLimits limits;
  double effort_weight = 1.0;
  double terminal_speed_weight = 0.0;
  double terminal_speed_target = 0.0;
  double running_speed_weight = 0.0;
  double running_speed_target = 0.0;
  std::optional<SigmoidPenalty> sigmoid;
  bool enforce_speed_bounds = true;
  bool enforce_control_bounds = true;
};

struct FixedHorizon {
  double t_f = 0.0;
};

/// Free final time constrained to [t_f_min, t_f_max].
struct FreeHorizon {
  double t_f_min = 0.0;
  double t_f_max = 0.0;
};

enum class StateVar { X, V };

/// coef * (x or v of `agent` at the node in question)
struct LinearTerm {
  int agent = 0;
  StateVar var = StateVar::X;
  double coef = 1.0;
};

enum class ConstraintKind { Equal, GreaterEqual };

/// sum(terms at t_f) + time_coef * t_f + constant (= or >=) 0
struct TerminalConstraint {
  std::vector<LinearTerm> terms;
  double time_coef = 0.0;
  double constant = 0.0;
  ConstraintKind kind = ConstraintKind::GreaterEqual;
};

/// sum(agent terms at t) + x_coef * ext.x(t) + v_coef * ext.v(t) + constant >= 0
/// at every transcription node. Requires a fixed horizon when `external` is set.
struct PathConstraint {
  std::vector<LinearTerm> terms;
  std::optional<Trajectory> external;
  double external_x_coef = 0.0;
  double external_v_coef = 0.0;
  double constant = 0.0;
};

/// Declarative optimal control problem over double-integrator agents.
struct OcpSpec {
  double t0 = 0.0;
  std::vector<AgentSpec> agents;
  bool free_horizon = false;
  FixedHorizon fixed;
  FreeHorizon free;
  double time_weight = 0.0;  // cost time_weight * (t_f - t0)
  std::vector<TerminalConstraint> terminal;
  std::vector<PathConstraint> path;

  static OcpSpec with_fixed_horizon(double t0, double t_f);
  static OcpSpec with_free_horizon(double t0, double t_f_min, double t_f_max);

  /// Throws std::invalid_argument on structural or sign errors.
  void validate() const;
};

/// Logistic risk function with its first two derivatives in the gap.
struct SigmoidValue {
  double s = 0.0;
  double ds = 0.0;
  double d2s = 0.0;
};

/// s(g) = 1 / (1 + mu * exp(mu * (g - d))) with the exponent clamped to
/// [-50, 50]; outside that window the derivatives are reported as zero.
SigmoidValue sigmoid_eval(double gap, double mu, double d);

}  // namespace lanechange
