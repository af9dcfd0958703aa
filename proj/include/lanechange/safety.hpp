#pragma once

#include <string>
#include <vector>

#include "lanechange/trajectory.hpp"
#include "lanechange/vehicle.hpp"

namespace lanechange {

enum class SafetyConstraint {
  RearEndCav1Hdv,   // x_1(t) - x_H(t) >= d(v_H(t)) for all t
  TerminalCavCHdv,  // x_C(tf) - x_H(tf) >= d(v_H(tf))
  TerminalCav1CavC, // x_1(tf) - x_C(tf) >= d(v_C(tf))
  TerminalCavCCav1, // x_C(tf) - x_1(tf) >= d(v_1(tf)), C merged ahead of 1
};

/// Where CAV C ends up in the target lane.
enum class MergeSlot {
  BetweenCav1AndHdv,  // order 1, C, H
  AheadOfCav1,        // order C, 1, H
};

std::string to_string(SafetyConstraint c);

struct SafetyViolation {
  SafetyConstraint constraint;
  double t;
  double slack;  // negative: amount by which the gap falls short
};

inline constexpr double kSafetyTolerance = 1e-6;

/// Checks the lane-change safety triplet on [t0, t_f].
///
/// The rear-end condition between CAV 1 and the HDV is checked at every sample
/// time of the three trajectories; the merge conditions only at t_f. With
/// MergeSlot::AheadOfCav1 the single terminal condition is C ahead of 1.
/// All trajectories must start at the same time and reach t_f, otherwise
/// std::invalid_argument is thrown.
std::vector<SafetyViolation> check_safety_triplet(
    const Trajectory& traj_1, const Trajectory& traj_C, const Trajectory& traj_H,
    const SafetyParams& p, double t_f, double tol = kSafetyTolerance,
    MergeSlot slot = MergeSlot::BetweenCav1AndHdv);

/// Smallest slack of each condition; useful for reporting margins.
struct SafetyMargins {
  double rear_end = 0.0;
  double merge_behind = 0.0;  // gap of C over its follower at t_f
  double merge_ahead = 0.0;   // gap of C's leader over C at t_f
};

SafetyMargins safety_margins(const Trajectory& traj_1, const Trajectory& traj_C,
                             const Trajectory& traj_H, const SafetyParams& p,
                             double t_f,
                             MergeSlot slot = MergeSlot::BetweenCav1AndHdv);

}  // namespace lanechange
