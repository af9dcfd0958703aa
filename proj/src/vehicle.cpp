#include "lanechange/vehicle.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace lanechange {

void VehicleLimits::validate() const {
  if (!(u_min < 0.0 && u_max > 0.0)) {
    throw std::invalid_argument("VehicleLimits: require u_min < 0 < u_max");
  }
  if (!(v_min > 0.0 && v_min < v_max)) {
    throw std::invalid_argument("VehicleLimits: require 0 < v_min < v_max");
  }
}

void SafetyParams::validate() const {
  if (!(phi >= 0.0) || !(delta > 0.0)) {
    throw std::invalid_argument("SafetyParams: require phi >= 0, delta > 0");
  }
}

void DisruptionWeights::validate() const {
  if (!(gamma_x >= 0.0 && gamma_v >= 0.0) ||
      std::abs(gamma_x + gamma_v - 1.0) > 1e-12) {
    throw std::invalid_argument(
        "DisruptionWeights: gamma_x, gamma_v must be a convex combination");
  }
}

double safe_distance(double v, const SafetyParams& p) {
  if (!(v >= 0.0)) {
    throw std::invalid_argument("safe_distance: speed must be nonnegative");
  }
  return p.phi * v + p.delta;
}

VehicleState propagate(const VehicleState& s, double u, double t0, double t1) {
  if (std::isnan(s.x) || std::isnan(s.v) || std::isnan(u) || std::isnan(t0) ||
      std::isnan(t1)) {
    throw std::invalid_argument("propagate: NaN input");
  }
  if (t1 < t0) throw std::invalid_argument("propagate: t1 < t0");
  const double dt = t1 - t0;
  return {s.x + s.v * dt + 0.5 * u * dt * dt, s.v + u * dt};
}

VehicleState propagate(const VehicleState& s,
                       const std::function<double(double)>& u, double t0,
                       double t1, int panels) {
  if (std::isnan(s.x) || std::isnan(s.v) || std::isnan(t0) || std::isnan(t1)) {
    throw std::invalid_argument("propagate: NaN input");
  }
  if (t1 < t0) throw std::invalid_argument("propagate: t1 < t0");
  if (panels < 1) throw std::invalid_argument("propagate: panels < 1");

  static constexpr std::array<double, 5> kNodes = {
      0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
      0.9061798459386640};
  static constexpr std::array<double, 5> kWeights = {
      0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
      0.2369268850561891, 0.2369268850561891};

  // v(t1) = v + int u,  x(t1) = x + v*dt + int (t1 - s) u(s) ds
  double du = 0.0;
  double dx = 0.0;
  const double width = (t1 - t0) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = t0 + p * width;
    const double mid = a + 0.5 * width;
    for (std::size_t q = 0; q < kNodes.size(); ++q) {
      const double tq = mid + 0.5 * width * kNodes[q];
      const double uq = u(tq);
      if (std::isnan(uq)) throw std::invalid_argument("propagate: NaN control");
      const double w = 0.5 * width * kWeights[q];
      du += w * uq;
      dx += w * (t1 - tq) * uq;
    }
  }
  return {s.x + s.v * (t1 - t0) + dx, s.v + du};
}

}  // namespace lanechange
