#include "lanechange/hdv.hpp"

#include <cmath>
#include <stdexcept>

namespace lanechange {

void HdvProfile::validate() const {
  if (!(beta_u >= 0.0 && beta_v >= 0.0 && beta_s >= 0.0)) {
    throw std::invalid_argument("HdvProfile: beta weights must be >= 0");
  }
  if (!(mu > 0.0) || !std::isfinite(d)) {
    throw std::invalid_argument("HdvProfile: require mu > 0 and finite d");
  }
  if (v_d_H && !(*v_d_H >= 0.0)) throw std::invalid_argument("HdvProfile: v_d_H < 0");
}

double sigmoid_safety(double gap, const HdvProfile& profile) {
  if (!std::isfinite(gap)) throw std::invalid_argument("sigmoid_safety: gap not finite");
  return sigmoid_eval(gap, profile.mu, profile.d).s;
}

NlpSolution solve_hdv_response(const Trajectory& x_C_star, const Trajectory& x_1_star,
                               const VehicleState& init, const HdvProfile& profile,
                               double t1, double t_f, const SafetyParams& p,
                               const VehicleLimits& limits, const CostScaling& scaling,
                               const OcpSolveOptions& opts, const WarmStart* warm) {
  profile.validate();
  scaling.validate();
  OcpSpec spec = OcpSpec::with_fixed_horizon(t1, t_f);
  AgentSpec h;
  h.init = init;
  h.limits = limits;
  h.effort_weight = profile.beta_u / scaling.effort;
  h.running_speed_weight = profile.beta_v / scaling.speed;
  h.running_speed_target = profile.desired_speed(init);
  if (profile.beta_s > 0.0) {
    h.sigmoid = SigmoidPenalty{profile.beta_s, profile.mu, profile.d, x_C_star};
  }
  spec.agents.push_back(std::move(h));

  // x_1*(t) - x_H(t) - phi v_H(t) - delta >= 0
  PathConstraint follow;
  follow.terms = {{0, StateVar::X, -1.0}, {0, StateVar::V, -p.phi}};
  follow.external = x_1_star;
  follow.external_x_coef = 1.0;
  follow.constant = -p.delta;
  spec.path.push_back(std::move(follow));

  return solve_ocp(spec, opts, warm);
}

}  // namespace lanechange
