#include "lanechange/transcription.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lanechange {

using Eigen::VectorXd;

namespace {

void add_sym(Triplets& out, int i, int j, double v) {
  if (i < 0 || j < 0) return;
  out.emplace_back(i, j, v);
  if (i != j) out.emplace_back(j, i, v);
}

}  // namespace

Transcription::Transcription(OcpSpec spec, int n_nodes)
    : spec_(std::move(spec)), n_(n_nodes) {
  if (n_nodes < 3) throw std::invalid_argument("Transcription: n_nodes must be >= 3");
  spec_.validate();
  block_ = 3 * (n_ - 1);
  const int n_agents = num_agents();
  n_vars_ = n_agents * block_ + (spec_.free_horizon ? 1 : 0);

  n_terminal_eq_ = 0;
  for (const auto& c : spec_.terminal) {
    if (c.kind == ConstraintKind::Equal) ++n_terminal_eq_;
  }
  n_eq_ = n_agents * 2 * (n_ - 1) + n_terminal_eq_;

  int n_in = static_cast<int>(spec_.terminal.size()) - n_terminal_eq_;
  n_in += static_cast<int>(spec_.path.size()) * (n_ - 1);
  for (const auto& a : spec_.agents) {
    if (a.enforce_control_bounds) n_in += 2 * (n_ - 1);
    if (a.enforce_speed_bounds) n_in += 2 * (n_ - 1);
  }
  if (spec_.free_horizon) n_in += 2;
  n_in_ = n_in;

  int eq_row = n_agents * 2 * (n_ - 1);
  int in_row = n_eq_;
  for (const auto& c : spec_.terminal) {
    terminal_rows_.push_back(c.kind == ConstraintKind::Equal ? eq_row++ : in_row++);
  }

  if (!spec_.free_horizon) {
    const auto times = node_times(spec_.fixed.t_f);
    for (const auto& p : spec_.path) {
      std::vector<double> vals(n_, 0.0);
      if (p.external) {
        for (int k = 0; k < n_; ++k) {
          const auto s = p.external->at(times[k]);
          vals[k] = p.external_x_coef * s.x + p.external_v_coef * s.v;
        }
      }
      path_external_.push_back(std::move(vals));
    }
    for (const auto& a : spec_.agents) {
      std::vector<double> lx;
      if (a.sigmoid) {
        lx.resize(n_);
        for (int k = 0; k < n_; ++k) lx[k] = a.sigmoid->leader.at(times[k]).x;
      }
      leader_x_.push_back(std::move(lx));
    }
  } else {
    path_external_.assign(spec_.path.size(), std::vector<double>(n_, 0.0));
    leader_x_.assign(spec_.agents.size(), {});
  }
}

Transcription::Term Transcription::term_x(int a, int k) const {
  if (k == 0) return {-1, spec_.agents[a].init.x};
  return {idx_x(a, k), 0.0};
}

Transcription::Term Transcription::term_v(int a, int k) const {
  if (k == 0) return {-1, spec_.agents[a].init.v};
  return {idx_v(a, k), 0.0};
}

double Transcription::final_time(const VectorXd& z) const {
  return spec_.free_horizon ? z[idx_tf()] : spec_.fixed.t_f;
}

double Transcription::step(const VectorXd& z) const {
  return (final_time(z) - spec_.t0) / (n_ - 1);
}

std::vector<double> Transcription::node_times(double t_f) const {
  std::vector<double> t(n_);
  for (int k = 0; k < n_; ++k) t[k] = spec_.t0 + (t_f - spec_.t0) * k / (n_ - 1);
  t.back() = t_f;
  return t;
}

double Transcription::state_term(const VectorXd& z, const LinearTerm& t, int k) const {
  const Term term = t.var == StateVar::X ? term_x(t.agent, k) : term_v(t.agent, k);
  return t.coef * value(z, term);
}

int Transcription::state_index(const LinearTerm& t, int k) const {
  if (k == 0) return -1;
  return t.var == StateVar::X ? idx_x(t.agent, k) : idx_v(t.agent, k);
}

double Transcription::time_cost(const VectorXd& z) const {
  return spec_.time_weight * (final_time(z) - spec_.t0);
}

double Transcription::agent_cost(const VectorXd& z, int a) const {
  const AgentSpec& ag = spec_.agents[a];
  const double h = step(z);
  double J = 0.0;
  for (int k = 0; k + 1 < n_; ++k) {
    const double u = z[idx_u(a, k)];
    J += 0.5 * ag.effort_weight * h * u * u;
  }
  if (ag.running_speed_weight > 0.0) {
    for (int k = 0; k + 1 < n_; ++k) {
      const double e0 = value(z, term_v(a, k)) - ag.running_speed_target;
      const double e1 = value(z, term_v(a, k + 1)) - ag.running_speed_target;
      J += ag.running_speed_weight * h / 3.0 * (e0 * e0 + e0 * e1 + e1 * e1);
    }
  }
  const double ev = z[idx_v(a, n_ - 1)] - ag.terminal_speed_target;
  J += ag.terminal_speed_weight * ev * ev;
  if (ag.sigmoid && ag.sigmoid->weight > 0.0) {
    const auto& sg = *ag.sigmoid;
    for (int k = 0; k < n_; ++k) {
      const double wk = (k == 0 || k == n_ - 1) ? 0.5 : 1.0;
      const double gap = leader_x_[a][k] - value(z, term_x(a, k));
      J += sg.weight * h * wk * sigmoid_eval(gap, sg.mu, sg.d).s;
    }
  }
  return J;
}

double Transcription::objective(const VectorXd& z) const {
  double J = time_cost(z);
  for (int a = 0; a < num_agents(); ++a) J += agent_cost(z, a);
  return J;
}

void Transcription::objective_gradient(const VectorXd& z, VectorXd& g) const {
  g.setZero(n_vars_);
  const double h = step(z);
  const double dh = dh_dtf();
  double g_tf = spec_.free_horizon ? spec_.time_weight : 0.0;
  for (int a = 0; a < num_agents(); ++a) {
    const AgentSpec& ag = spec_.agents[a];
    for (int k = 0; k + 1 < n_; ++k) {
      const double u = z[idx_u(a, k)];
      g[idx_u(a, k)] += ag.effort_weight * h * u;
      g_tf += 0.5 * ag.effort_weight * dh * u * u;
    }
    if (ag.running_speed_weight > 0.0) {
      const double w = ag.running_speed_weight;
      for (int k = 0; k + 1 < n_; ++k) {
        const Term t0 = term_v(a, k);
        const Term t1 = term_v(a, k + 1);
        const double e0 = value(z, t0) - ag.running_speed_target;
        const double e1 = value(z, t1) - ag.running_speed_target;
        if (t0.index >= 0) g[t0.index] += w * h / 3.0 * (2.0 * e0 + e1);
        g[t1.index] += w * h / 3.0 * (e0 + 2.0 * e1);
        g_tf += w * dh / 3.0 * (e0 * e0 + e0 * e1 + e1 * e1);
      }
    }
    const double ev = z[idx_v(a, n_ - 1)] - ag.terminal_speed_target;
    g[idx_v(a, n_ - 1)] += 2.0 * ag.terminal_speed_weight * ev;
    if (ag.sigmoid && ag.sigmoid->weight > 0.0) {
      const auto& sg = *ag.sigmoid;
      for (int k = 1; k < n_; ++k) {
        const double wk = (k == n_ - 1) ? 0.5 : 1.0;
        const double gap = leader_x_[a][k] - z[idx_x(a, k)];
        g[idx_x(a, k)] -= sg.weight * h * wk * sigmoid_eval(gap, sg.mu, sg.d).ds;
      }
    }
  }
  if (spec_.free_horizon) g[idx_tf()] = g_tf;
}

void Transcription::objective_hessian(const VectorXd& z, Triplets& out) const {
  const double h = step(z);
  const double dh = dh_dtf();
  const int tf = spec_.free_horizon ? idx_tf() : -1;
  for (int a = 0; a < num_agents(); ++a) {
    const AgentSpec& ag = spec_.agents[a];
    for (int k = 0; k + 1 < n_; ++k) {
      const int iu = idx_u(a, k);
      add_sym(out, iu, iu, ag.effort_weight * h);
      add_sym(out, iu, tf, ag.effort_weight * dh * z[iu]);
    }
    if (ag.running_speed_weight > 0.0) {
      const double w = ag.running_speed_weight;
      for (int k = 0; k + 1 < n_; ++k) {
        const Term t0 = term_v(a, k);
        const Term t1 = term_v(a, k + 1);
        const double e0 = value(z, t0) - ag.running_speed_target;
        const double e1 = value(z, t1) - ag.running_speed_target;
        add_sym(out, t0.index, t0.index, 2.0 * w * h / 3.0);
        add_sym(out, t1.index, t1.index, 2.0 * w * h / 3.0);
        add_sym(out, t0.index, t1.index, w * h / 3.0);
        if (tf >= 0) {
          add_sym(out, t0.index, tf, w * dh / 3.0 * (2.0 * e0 + e1));
          add_sym(out, t1.index, tf, w * dh / 3.0 * (e0 + 2.0 * e1));
        }
      }
    }
    add_sym(out, idx_v(a, n_ - 1), idx_v(a, n_ - 1), 2.0 * ag.terminal_speed_weight);
    if (ag.sigmoid && ag.sigmoid->weight > 0.0) {
      const auto& sg = *ag.sigmoid;
      for (int k = 1; k < n_; ++k) {
        const double wk = (k == n_ - 1) ? 0.5 : 1.0;
        const double gap = leader_x_[a][k] - z[idx_x(a, k)];
        add_sym(out, idx_x(a, k), idx_x(a, k),
                sg.weight * h * wk * sigmoid_eval(gap, sg.mu, sg.d).d2s);
      }
    }
  }
}

void Transcription::constraints(const VectorXd& z, VectorXd& c) const {
  c.resize(n_eq_ + n_in_);
  const double h = step(z);
  const double t_f = final_time(z);
  int row = 0;
  for (int a = 0; a < num_agents(); ++a) {
    for (int k = 0; k + 1 < n_; ++k) {
      const double v0 = value(z, term_v(a, k));
      const double v1 = z[idx_v(a, k + 1)];
      const double x0 = value(z, term_x(a, k));
      const double x1 = z[idx_x(a, k + 1)];
      c[row++] = v1 - v0 - h * z[idx_u(a, k)];
      c[row++] = x1 - x0 - 0.5 * h * (v0 + v1);
    }
  }
  std::vector<double> term_vals;
  for (const auto& tc : spec_.terminal) {
    double val = tc.time_coef * t_f + tc.constant;
    for (const auto& t : tc.terms) val += state_term(z, t, n_ - 1);
    term_vals.push_back(val);
  }
  for (std::size_t i = 0; i < spec_.terminal.size(); ++i) {
    c[terminal_rows_[i]] = term_vals[i];
  }
  row = n_eq_ + static_cast<int>(spec_.terminal.size()) - n_terminal_eq_;
  for (std::size_t p = 0; p < spec_.path.size(); ++p) {
    const auto& pc = spec_.path[p];
    for (int k = 1; k < n_; ++k) {
      double val = pc.constant + path_external_[p][k];
      for (const auto& t : pc.terms) val += state_term(z, t, k);
      c[row++] = val;
    }
  }
  for (int a = 0; a < num_agents(); ++a) {
    const auto& lim = spec_.agents[a].limits;
    if (spec_.agents[a].enforce_control_bounds) {
      for (int k = 0; k + 1 < n_; ++k) {
        c[row++] = z[idx_u(a, k)] - lim.u_min;
        c[row++] = lim.u_max - z[idx_u(a, k)];
      }
    }
    if (spec_.agents[a].enforce_speed_bounds) {
      for (int k = 1; k < n_; ++k) {
        c[row++] = z[idx_v(a, k)] - lim.v_min;
        c[row++] = lim.v_max - z[idx_v(a, k)];
      }
    }
  }
  if (spec_.free_horizon) {
    c[row++] = t_f - spec_.free.t_f_min;
    c[row++] = spec_.free.t_f_max - t_f;
  }
}

void Transcription::constraint_jacobian(const VectorXd& z, SparseRowMatrix& J) const {
  Triplets trips;
  trips.reserve(static_cast<std::size_t>(12 * n_ * num_agents() + 4 * n_in_));
  const double h = step(z);
  const double dh = dh_dtf();
  const int tf = spec_.free_horizon ? idx_tf() : -1;
  auto put = [&](int r, int col, double v) {
    if (col >= 0) trips.emplace_back(r, col, v);
  };
  int row = 0;
  for (int a = 0; a < num_agents(); ++a) {
    for (int k = 0; k + 1 < n_; ++k) {
      const Term tv0 = term_v(a, k);
      const Term tx0 = term_x(a, k);
      const double v0 = value(z, tv0);
      const double v1 = z[idx_v(a, k + 1)];
      put(row, idx_v(a, k + 1), 1.0);
      put(row, tv0.index, -1.0);
      put(row, idx_u(a, k), -h);
      put(row, tf, -dh * z[idx_u(a, k)]);
      ++row;
      put(row, idx_x(a, k + 1), 1.0);
      put(row, tx0.index, -1.0);
      put(row, tv0.index, -0.5 * h);
      put(row, idx_v(a, k + 1), -0.5 * h);
      put(row, tf, -0.5 * dh * (v0 + v1));
      ++row;
    }
  }
  for (std::size_t i = 0; i < spec_.terminal.size(); ++i) {
    const auto& tc = spec_.terminal[i];
    const int r = terminal_rows_[i];
    for (const auto& t : tc.terms) put(r, state_index(t, n_ - 1), t.coef);
    put(r, tf, tc.time_coef);
  }
  row = n_eq_ + static_cast<int>(spec_.terminal.size()) - n_terminal_eq_;
  for (const auto& pc : spec_.path) {
    for (int k = 1; k < n_; ++k) {
      for (const auto& t : pc.terms) put(row, state_index(t, k), t.coef);
      ++row;
    }
  }
  for (int a = 0; a < num_agents(); ++a) {
    if (spec_.agents[a].enforce_control_bounds) {
      for (int k = 0; k + 1 < n_; ++k) {
        put(row++, idx_u(a, k), 1.0);
        put(row++, idx_u(a, k), -1.0);
      }
    }
    if (spec_.agents[a].enforce_speed_bounds) {
      for (int k = 1; k < n_; ++k) {
        put(row++, idx_v(a, k), 1.0);
        put(row++, idx_v(a, k), -1.0);
      }
    }
  }
  if (spec_.free_horizon) {
    put(row++, tf, 1.0);
    put(row++, tf, -1.0);
  }
  J.resize(n_eq_ + n_in_, n_vars_);
  J.setFromTriplets(trips.begin(), trips.end());
}

void Transcription::constraint_hessian(const VectorXd& /*z*/, const VectorXd& w,
                                       Triplets& out) const {
  // Only the defects are nonlinear, and only through h(t_f).
  if (!spec_.free_horizon) return;
  const double dh = dh_dtf();
  const int tf = idx_tf();
  int row = 0;
  for (int a = 0; a < num_agents(); ++a) {
    for (int k = 0; k + 1 < n_; ++k) {
      const double wv = w[row++];
      const double wx = w[row++];
      add_sym(out, idx_u(a, k), tf, -dh * wv);
      add_sym(out, term_v(a, k).index, tf, -0.5 * dh * wx);
      add_sym(out, idx_v(a, k + 1), tf, -0.5 * dh * wx);
    }
  }
}

double Transcription::max_step(const VectorXd& z, const VectorXd& d) const {
  if (!spec_.free_horizon) return 1.0;
  // t_f may undershoot its lower bound while the multiplier builds up, but
  // never by more than half the minimum duration.
  const double floor = spec_.t0 + 0.5 * (spec_.free.t_f_min - spec_.t0);
  const double dtf = d[idx_tf()];
  const double room = z[idx_tf()] - floor;
  if (dtf >= 0.0 || room + dtf > 0.1 * room) return 1.0;
  return 0.9 * room / -dtf;
}

VectorXd Transcription::initial_guess() const {
  const double t_f = spec_.free_horizon
                         ? 0.5 * (spec_.free.t_f_min + spec_.free.t_f_max)
                         : spec_.fixed.t_f;
  return initial_guess(t_f);
}

VectorXd Transcription::initial_guess(double t_f) const {
  std::vector<std::vector<double>> zeros(num_agents(), std::vector<double>(n_ - 1, 0.0));
  return pack_controls(zeros, t_f);
}

VectorXd Transcription::pack_controls(const std::vector<std::vector<double>>& controls,
                                      double t_f) const {
  if (static_cast<int>(controls.size()) != num_agents()) {
    throw std::invalid_argument("pack_controls: one control sequence per agent required");
  }
  const auto times = node_times(t_f);
  VectorXd z = VectorXd::Zero(n_vars_);
  for (int a = 0; a < num_agents(); ++a) {
    if (static_cast<int>(controls[a].size()) != n_ - 1) {
      throw std::invalid_argument("pack_controls: wrong control count");
    }
    VehicleState s = spec_.agents[a].init;
    for (int k = 0; k + 1 < n_; ++k) {
      z[idx_u(a, k)] = controls[a][k];
      s = propagate(s, controls[a][k], times[k], times[k + 1]);
      z[idx_x(a, k + 1)] = s.x;
      z[idx_v(a, k + 1)] = s.v;
    }
  }
  if (spec_.free_horizon) z[idx_tf()] = t_f;
  return z;
}

VectorXd Transcription::pack(const std::vector<Trajectory>& trajs, double t_f) const {
  if (static_cast<int>(trajs.size()) != num_agents()) {
    throw std::invalid_argument("pack: one trajectory per agent required");
  }
  const auto times = node_times(t_f);
  const double h = (t_f - spec_.t0) / (n_ - 1);
  std::vector<std::vector<double>> controls(num_agents());
  for (int a = 0; a < num_agents(); ++a) {
    const Trajectory& tr = trajs[a];
    auto speed = [&](double t) {
      if (t <= tr.t_end()) return tr.at(std::max(t, tr.t_start())).v;
      return tr.back().v;
    };
    for (int k = 0; k + 1 < n_; ++k) {
      controls[a].push_back((speed(times[k + 1]) - speed(times[k])) / h);
    }
  }
  return pack_controls(controls, t_f);
}

std::vector<Trajectory> Transcription::unpack(const VectorXd& z) const {
  const auto times = node_times(final_time(z));
  std::vector<Trajectory> out;
  for (int a = 0; a < num_agents(); ++a) {
    std::vector<Trajectory::Sample> s(n_);
    for (int k = 0; k < n_; ++k) {
      s[k].t = times[k];
      s[k].x = value(z, term_x(a, k));
      s[k].v = value(z, term_v(a, k));
      s[k].u = z[idx_u(a, std::min(k, n_ - 2))];
    }
    out.emplace_back(std::move(s));
  }
  return out;
}

double Transcription::initial_path_violation() const {
  double worst = 0.0;
  for (std::size_t p = 0; p < spec_.path.size(); ++p) {
    const auto& pc = spec_.path[p];
    double val = pc.constant + path_external_[p][0];
    for (const auto& t : pc.terms) {
      const auto& init = spec_.agents[t.agent].init;
      val += t.coef * (t.var == StateVar::X ? init.x : init.v);
    }
    worst = std::max(worst, -val);
  }
  return worst;
}

}  // namespace lanechange
