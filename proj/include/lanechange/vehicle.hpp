#pragma once

#include <functional>

namespace lanechange {

/// Longitudinal state of one vehicle: position [m] and speed [m/s].
struct VehicleState {
  double x = 0.0;
  double v = 0.0;
};

/// Acceleration and speed box for one vehicle.
struct VehicleLimits {
  double u_min = -7.0;  // m/s^2
  double u_max = 3.3;   // m/s^2
  double v_min = 15.0;  // m/s
  double v_max = 35.0;  // m/s

  /// Throws std::invalid_argument unless u_min < 0 < u_max and 0 < v_min < v_max.
  void validate() const;
};

/// Headway model d(v) = phi * v + delta.
struct SafetyParams {
  double phi = 0.6;    // reaction time, s
  double delta = 1.5;  // standstill gap, m

  void validate() const;
};

/// Convex weights of the position and speed disruption terms.
struct DisruptionWeights {
  double gamma_x = 0.5;
  double gamma_v = 0.5;

  void validate() const;
};

/// Minimum speed-dependent gap a vehicle keeps to its predecessor.
double safe_distance(double v, const SafetyParams& p);

/// Exact double-integrator flow under a constant control over [t0, t1].
VehicleState propagate(const VehicleState& s, double u, double t0, double t1);

/// Double-integrator flow under a smooth control profile.
///
/// Integrates v' = u and x' = v with composite 5-point Gauss-Legendre
/// quadrature on `panels` sub-intervals, which is exact for polynomial
/// controls up to degree 8. Use the constant-control overload for
/// piecewise-constant inputs.
VehicleState propagate(const VehicleState& s,
                       const std::function<double(double)>& u, double t0,
                       double t1, int panels = 8);

}  // namespace lanechange
