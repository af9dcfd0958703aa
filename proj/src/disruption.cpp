#include "lanechange/disruption.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lanechange {

namespace {
// The shortfall is piecewise quadratic and its positive part has a kink, so
// each interval is split before applying Simpson's rule.
constexpr int kPanelsPerInterval = 16;
}  // namespace

double disruption_at(const Trajectory::Sample& s, double t0, double x0, double v0,
                     double v_d, const DisruptionWeights& w) {
  const double xbar = x0 + v0 * (s.t - t0);
  // lags below rounding of the position itself do not count as disruption
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                       std::max({1.0, std::abs(xbar), std::abs(x0)});
  const double ex = s.x < xbar - noise ? s.x - xbar : 0.0;
  const double ev = s.v - v_d;
  return w.gamma_x * ex * ex + w.gamma_v * ev * ev;
}

double disruption(const Trajectory& traj, double x0, double v0, double v_d,
                  const DisruptionWeights& w, DisruptionAggregation agg) {
  if (traj.empty()) throw std::invalid_argument("disruption: empty trajectory");
  w.validate();
  const double t0 = traj.t_start();
  const double tf = traj.t_end();
  if (agg == DisruptionAggregation::Terminal || traj.size() == 1) {
    const double d = disruption_at(traj.back(), t0, x0, v0, v_d, w);
    return agg == DisruptionAggregation::Integral ? 0.0 : d;
  }
  const auto samples = traj.samples();
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const double a = samples[k].t;
    const double h = (samples[k + 1].t - a) / kPanelsPerInterval;
    auto f = [&](double t) {
      const VehicleState s = propagate({samples[k].x, samples[k].v}, samples[k].u, a, t);
      return disruption_at({t, s.x, s.v, samples[k].u}, t0, x0, v0, v_d, w);
    };
    for (int p = 0; p < kPanelsPerInterval; ++p) {
      const double l = a + p * h;
      integral += h / 6.0 * (f(l) + 4.0 * f(l + 0.5 * h) + f(l + h));
    }
  }
  return agg == DisruptionAggregation::Integral ? integral : integral / (tf - t0);
}

}  // namespace lanechange
