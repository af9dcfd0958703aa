#include "lanechange/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lanechange {

Trajectory::Trajectory(std::vector<Sample> samples)
    : samples_(std::move(samples)) {
  if (samples_.empty()) throw std::invalid_argument("Trajectory: no samples");
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    const auto& s = samples_[k];
    if (!std::isfinite(s.t) || !std::isfinite(s.x) || !std::isfinite(s.v) ||
        !std::isfinite(s.u)) {
      throw std::invalid_argument("Trajectory: non-finite sample");
    }
    if (k > 0 && !(s.t > samples_[k - 1].t)) {
      throw std::invalid_argument("Trajectory: sample times must increase");
    }
  }
}

Trajectory Trajectory::from_controls(const VehicleState& s0,
                                     std::span<const double> times,
                                     std::span<const double> controls) {
  if (times.empty() || controls.size() + 1 != times.size()) {
    throw std::invalid_argument("Trajectory::from_controls: size mismatch");
  }
  std::vector<Sample> out;
  out.reserve(times.size());
  VehicleState s = s0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double u = controls.empty()
                         ? 0.0
                         : controls[std::min(k, controls.size() - 1)];
    out.push_back({times[k], s.x, s.v, u});
    if (k + 1 < times.size()) s = propagate(s, controls[k], times[k], times[k + 1]);
  }
  return Trajectory(std::move(out));
}

Trajectory Trajectory::constant_speed(const VehicleState& s0, double t0,
                                      double t1, int nodes) {
  if (nodes < 1) throw std::invalid_argument("constant_speed: nodes < 1");
  if (nodes == 1 || t1 <= t0) {
    return Trajectory({{t0, s0.x, s0.v, 0.0}});
  }
  std::vector<Sample> out(static_cast<std::size_t>(nodes));
  for (int k = 0; k < nodes; ++k) {
    const double t = t0 + (t1 - t0) * k / (nodes - 1);
    out[static_cast<std::size_t>(k)] = {t, s0.x + s0.v * (t - t0), s0.v, 0.0};
  }
  return Trajectory(std::move(out));
}

double Trajectory::t_start() const {
  if (samples_.empty()) throw std::logic_error("Trajectory: empty");
  return samples_.front().t;
}

double Trajectory::t_end() const {
  if (samples_.empty()) throw std::logic_error("Trajectory: empty");
  return samples_.back().t;
}

Trajectory::Sample Trajectory::at(double t) const {
  if (samples_.empty()) throw std::logic_error("Trajectory: empty");
  constexpr double kSlack = 1e-9;
  if (t < t_start() - kSlack || t > t_end() + kSlack) {
    throw std::out_of_range("Trajectory::at: time outside trajectory");
  }
  t = std::clamp(t, t_start(), t_end());
  auto it = std::upper_bound(
      samples_.begin(), samples_.end(), t,
      [](double value, const Sample& s) { return value < s.t; });
  const Sample& base = *std::prev(it);
  if (base.t == t) return base;
  const VehicleState s = propagate({base.x, base.v}, base.u, base.t, t);
  return {t, s.x, s.v, base.u};
}

VehicleState Trajectory::state_at(double t) const {
  const Sample s = at(t);
  return {s.x, s.v};
}

std::vector<double> Trajectory::times() const {
  std::vector<double> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.t);
  return out;
}

std::vector<double> Trajectory::interval_controls() const {
  std::vector<double> out;
  if (samples_.size() < 2) return out;
  out.reserve(samples_.size() - 1);
  for (std::size_t k = 0; k + 1 < samples_.size(); ++k) out.push_back(samples_[k].u);
  return out;
}

Trajectory Trajectory::resampled(std::span<const double> times) const {
  std::vector<Sample> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(at(t));
  // the final sample keeps the control of the last interval
  if (out.size() >= 2) out.back().u = out[out.size() - 2].u;
  return Trajectory(std::move(out));
}

Trajectory Trajectory::concatenated(const Trajectory& next) const {
  if (empty()) return next;
  if (next.empty()) return *this;
  if (std::abs(next.t_start() - t_end()) > 1e-9) {
    throw std::invalid_argument("Trajectory::concatenated: time gap");
  }
  std::vector<Sample> out(samples_.begin(), samples_.end());
  if (next.size() == 1) return Trajectory(std::move(out));
  // the junction sample takes the state of `this` and the control of `next`
  out.back().u = next.front().u;
  out.insert(out.end(), next.samples_.begin() + 1, next.samples_.end());
  return Trajectory(std::move(out));
}

std::vector<double> merge_time_grids(std::span<const Trajectory> trajectories,
                                     double tol) {
  std::vector<double> all;
  for (const auto& tr : trajectories) {
    for (const auto& s : tr.samples()) all.push_back(s.t);
  }
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double t : all) {
    if (out.empty() || t - out.back() > tol) out.push_back(t);
  }
  return out;
}

}  // namespace lanechange
