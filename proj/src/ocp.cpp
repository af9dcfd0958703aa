#include "lanechange/ocp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lanechange {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument("OcpSpec: " + msg);
}

bool finite_nonneg(double w) { return std::isfinite(w) && w >= 0.0; }

void check_terms(const std::vector<LinearTerm>& terms, std::size_t n_agents) {
  for (const auto& t : terms) {
    require(t.agent >= 0 && static_cast<std::size_t>(t.agent) < n_agents,
            "constraint references unknown agent");
    require(std::isfinite(t.coef), "non-finite constraint coefficient");
  }
}

}  // namespace

OcpSpec OcpSpec::with_fixed_horizon(double t0, double t_f) {
  OcpSpec s;
  s.t0 = t0;
  s.free_horizon = false;
  s.fixed.t_f = t_f;
  return s;
}

OcpSpec OcpSpec::with_free_horizon(double t0, double t_f_min, double t_f_max) {
  OcpSpec s;
  s.t0 = t0;
  s.free_horizon = true;
  s.free = {t_f_min, t_f_max};
  return s;
}

void OcpSpec::validate() const {
  require(std::isfinite(t0), "t0 must be finite");
  require(!agents.empty(), "at least one agent required");
  require(finite_nonneg(time_weight), "time weight must be >= 0");
  if (free_horizon) {
    require(std::isfinite(free.t_f_max) && free.t_f_max > t0,
            "free horizon requires an upper bound after t0");
    require(free.t_f_min > t0 && free.t_f_min <= free.t_f_max,
            "free horizon lower bound must lie in (t0, t_f_max]");
  } else {
    require(std::isfinite(fixed.t_f) && fixed.t_f > t0, "fixed t_f must exceed t0");
  }
  for (const auto& a : agents) {
    a.limits.validate();
    require(std::isfinite(a.init.x) && std::isfinite(a.init.v), "non-finite initial state");
    require(finite_nonneg(a.effort_weight) && finite_nonneg(a.terminal_speed_weight) &&
                finite_nonneg(a.running_speed_weight),
            "cost weights must be >= 0");
    if (a.sigmoid) {
      require(finite_nonneg(a.sigmoid->weight), "sigmoid weight must be >= 0");
      require(a.sigmoid->mu > 0.0, "sigmoid steepness must be > 0");
      require(!a.sigmoid->leader.empty(), "sigmoid penalty needs a leader trajectory");
      require(!free_horizon, "sigmoid penalty requires a fixed horizon");
    }
  }
  for (const auto& c : terminal) {
    check_terms(c.terms, agents.size());
    require(std::isfinite(c.time_coef) && std::isfinite(c.constant),
            "non-finite terminal constraint");
  }
  for (const auto& c : path) {
    check_terms(c.terms, agents.size());
    require(std::isfinite(c.constant), "non-finite path constraint");
    if (c.external) {
      require(!free_horizon, "path constraint on an external trajectory needs a fixed horizon");
    }
  }
}

SigmoidValue sigmoid_eval(double gap, double mu, double d) {
  constexpr double kClamp = 50.0;
  const double z = mu * (gap - d);
  if (z >= kClamp) return {1.0 / (1.0 + mu * std::exp(kClamp)), 0.0, 0.0};
  if (z <= -kClamp) return {1.0 / (1.0 + mu * std::exp(-kClamp)), 0.0, 0.0};
  const double s = 1.0 / (1.0 + mu * std::exp(z));
  // ds/dg = -mu s (1 - s), d2s/dg2 = mu^2 s (1 - s)(1 - 2 s)
  const double ds = -mu * s * (1.0 - s);
  const double d2s = mu * mu * s * (1.0 - s) * (1.0 - 2.0 * s);
  return {s, ds, d2s};
}

}  // namespace lanechange
