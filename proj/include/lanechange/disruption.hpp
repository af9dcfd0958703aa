#pragma once

#include "lanechange/trajectory.hpp"
#include "lanechange/vehicle.hpp"

namespace lanechange {

enum class DisruptionAggregation { Average, Integral, Terminal };

/// Pointwise disruption of one vehicle relative to cruising from (x0, v0).
///
/// d_x = (x - xbar)^2 while x lags xbar = x0 + v0 (t - t0), d_v = (v - v_d)^2,
/// and D = gamma_x d_x + gamma_v d_v.
double disruption_at(const Trajectory::Sample& s, double t0, double x0, double v0,
                     double v_d, const DisruptionWeights& w);

/// Aggregates the pointwise disruption over the whole trajectory.
///
/// Integral and Average use composite Simpson quadrature on every sample
/// interval; Average divides by the duration (zero-length trajectories return
/// the pointwise value).
double disruption(const Trajectory& traj, double x0, double v0, double v_d,
                  const DisruptionWeights& w,
                  DisruptionAggregation agg = DisruptionAggregation::Average);

}  // namespace lanechange
