#include "lanechange/safety.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lanechange {

namespace {

constexpr double kGridTol = 1e-9;

void require_shared_interval(const Trajectory& a, const Trajectory& b,
                             const Trajectory& c, double t_f) {
  for (const Trajectory* tr : {&a, &b, &c}) {
    if (tr->empty()) throw std::invalid_argument("safety check: empty trajectory");
  }
  const double t0 = a.t_start();
  if (std::abs(b.t_start() - t0) > kGridTol || std::abs(c.t_start() - t0) > kGridTol) {
    throw std::invalid_argument("safety check: trajectories start at different times");
  }
  if (t_f < t0 - kGridTol) throw std::invalid_argument("safety check: t_f before start");
  for (const Trajectory* tr : {&a, &b, &c}) {
    if (tr->t_end() < t_f - kGridTol) {
      throw std::invalid_argument("safety check: trajectory ends before t_f");
    }
  }
}

std::vector<double> check_times(const Trajectory& a, const Trajectory& b,
                                const Trajectory& c, double t_f) {
  const std::array<Trajectory, 3> all = {a, b, c};
  std::vector<double> grid = merge_time_grids(all);
  std::erase_if(grid, [&](double t) { return t > t_f + kGridTol; });
  if (grid.empty() || std::abs(grid.back() - t_f) > kGridTol) grid.push_back(t_f);
  return grid;
}

double rear_end_slack(const Trajectory& lead, const Trajectory& follow,
                      const SafetyParams& p, double t) {
  const auto l = lead.at(t);
  const auto f = follow.at(t);
  return l.x - f.x - (p.phi * f.v + p.delta);
}

}  // namespace

std::string to_string(SafetyConstraint c) {
  switch (c) {
    case SafetyConstraint::RearEndCav1Hdv: return "rear_end_1_H";
    case SafetyConstraint::TerminalCavCHdv: return "terminal_C_H";
    case SafetyConstraint::TerminalCav1CavC: return "terminal_1_C";
    case SafetyConstraint::TerminalCavCCav1: return "terminal_C_1";
  }
  return "unknown";
}

std::vector<SafetyViolation> check_safety_triplet(
    const Trajectory& traj_1, const Trajectory& traj_C, const Trajectory& traj_H,
    const SafetyParams& p, double t_f, double tol, MergeSlot slot) {
  require_shared_interval(traj_1, traj_C, traj_H, t_f);
  std::vector<SafetyViolation> out;
  for (double t : check_times(traj_1, traj_C, traj_H, t_f)) {
    const double s = rear_end_slack(traj_1, traj_H, p, t);
    if (s < -tol) out.push_back({SafetyConstraint::RearEndCav1Hdv, t, s});
  }
  if (slot == MergeSlot::BetweenCav1AndHdv) {
    const double s_b = rear_end_slack(traj_C, traj_H, p, t_f);
    if (s_b < -tol) out.push_back({SafetyConstraint::TerminalCavCHdv, t_f, s_b});
    const double s_c = rear_end_slack(traj_1, traj_C, p, t_f);
    if (s_c < -tol) out.push_back({SafetyConstraint::TerminalCav1CavC, t_f, s_c});
  } else {
    const double s_c = rear_end_slack(traj_C, traj_1, p, t_f);
    if (s_c < -tol) out.push_back({SafetyConstraint::TerminalCavCCav1, t_f, s_c});
  }
  return out;
}

SafetyMargins safety_margins(const Trajectory& traj_1, const Trajectory& traj_C,
                             const Trajectory& traj_H, const SafetyParams& p,
                             double t_f, MergeSlot slot) {
  require_shared_interval(traj_1, traj_C, traj_H, t_f);
  SafetyMargins m;
  m.rear_end = std::numeric_limits<double>::infinity();
  for (double t : check_times(traj_1, traj_C, traj_H, t_f)) {
    m.rear_end = std::min(m.rear_end, rear_end_slack(traj_1, traj_H, p, t));
  }
  if (slot == MergeSlot::BetweenCav1AndHdv) {
    m.merge_behind = rear_end_slack(traj_C, traj_H, p, t_f);
    m.merge_ahead = rear_end_slack(traj_1, traj_C, p, t_f);
  } else {
    m.merge_behind = rear_end_slack(traj_C, traj_1, p, t_f);
    m.merge_ahead = std::numeric_limits<double>::infinity();
  }
  return m;
}

}  // namespace lanechange
