#pragma once

#include <span>
#include <vector>

#include "lanechange/vehicle.hpp"

namespace lanechange {

/// Time-indexed state/control profile of one vehicle.
///
/// Samples carry (t, x, v, u) where u is the constant acceleration applied on
/// [t_k, t_{k+1}); the control stored on the last sample repeats the last
/// interval's value. Between samples the state follows the exact
/// double-integrator flow, so evaluation at arbitrary times is exact.
class Trajectory {
 public:
  struct Sample {
    double t = 0.0;
    double x = 0.0;
    double v = 0.0;
    double u = 0.0;
  };

  Trajectory() = default;

  /// Throws std::invalid_argument on empty input or non-increasing times.
  explicit Trajectory(std::vector<Sample> samples);

  /// Integrates piecewise-constant controls from `s0`; `controls[k]` applies
  /// on [times[k], times[k+1]). Requires controls.size() + 1 == times.size().
  static Trajectory from_controls(const VehicleState& s0,
                                  std::span<const double> times,
                                  std::span<const double> controls);

  /// Cruise at constant speed on a uniform grid of `nodes` samples.
  static Trajectory constant_speed(const VehicleState& s0, double t0, double t1,
                                   int nodes);

  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }
  double t_start() const;
  double t_end() const;
  std::span<const Sample> samples() const { return samples_; }
  const Sample& front() const { return samples_.front(); }
  const Sample& back() const { return samples_.back(); }

  /// Exact state and active control at time t within [t_start, t_end].
  Sample at(double t) const;
  VehicleState state_at(double t) const;

  std::vector<double> times() const;
  /// Interval controls (size() - 1 entries).
  std::vector<double> interval_controls() const;

  /// Re-expresses the trajectory on a grid that must contain every original
  /// sample time (otherwise the control would change mid-interval).
  Trajectory resampled(std::span<const double> times) const;

  /// Appends `next`, which must start where this trajectory ends.
  Trajectory concatenated(const Trajectory& next) const;

 private:
  std::vector<Sample> samples_;
};

/// Sorted union of sample times with near-duplicates (within `tol`) merged.
std::vector<double> merge_time_grids(std::span<const Trajectory> trajectories,
                                     double tol = 1e-9);

}  // namespace lanechange
