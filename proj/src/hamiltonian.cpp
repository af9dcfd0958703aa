#include "lanechange/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "lanechange/phase1.hpp"

namespace lanechange {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Unknown vector layout for the Newton solve; T is the duration t_f - t0.
enum Unknown { A1, B1, C1, D1, AC, BC, CC, DC, TT, NU, kUnknowns };

using Vec = Eigen::Matrix<double, kUnknowns, 1>;
using Mat = Eigen::Matrix<double, kUnknowns, kUnknowns>;

PolynomialSolution from_vec(const Vec& z, const MergeAheadProblem& pb) {
  PolynomialSolution s;
  // a_1 + nu = 0 and a_C - nu = 0 are linear, so pinning them only moves the
  // remaining residuals by rounding
  s.a_1 = -z[NU]; s.b_1 = z[B1]; s.c_1 = z[C1]; s.d_1 = z[D1];
  s.a_C = z[NU]; s.b_C = z[BC]; s.c_C = z[CC]; s.d_C = z[DC];
  s.t0 = pb.t0;
  s.t_f = pb.t0 + z[TT];
  s.nu = z[NU];
  s.alpha_u = pb.alpha_u();
  return s;
}

Vec to_vec(const PolynomialSolution& s) {
  Vec z;
  z << s.a_1, s.b_1, s.c_1, s.d_1, s.a_C, s.b_C, s.c_C, s.d_C, s.t_f - s.t0, s.nu;
  return z;
}

// alpha_u * v and alpha_u * x at duration T for coefficients (a, b, c, d)
double scaled_v(double a, double b, double c, double T) { return a * T * T / 2 + b * T + c; }
double scaled_x(double a, double b, double c, double d, double T) {
  return a * T * T * T / 6 + b * T * T / 2 + c * T + d;
}

Vec residual_vec(const Vec& z, const MergeAheadProblem& pb) {
  const double au = pb.alpha_u();
  const double av = pb.alpha_v();
  const double T = z[TT];
  const double v1 = scaled_v(z[A1], z[B1], z[C1], T) / au;
  const double vC = scaled_v(z[AC], z[BC], z[CC], T) / au;
  const double x1 = scaled_x(z[A1], z[B1], z[C1], z[D1], T) / au;
  const double xC = scaled_x(z[AC], z[BC], z[CC], z[DC], T) / au;
  const double phi = pb.safety.phi;
  Vec r;
  r[0] = z[A1] + z[NU];
  r[1] = z[AC] - z[NU];
  r[2] = z[A1] * T + z[B1] + av * (v1 - pb.v_d_1) - z[NU] * phi;
  r[3] = z[AC] * T + z[BC] + av * (vC - pb.v_d_C);
  r[4] = z[C1] - au * pb.cav1.v;
  r[5] = z[CC] - au * pb.cavC.v;
  r[6] = z[D1] - au * pb.cav1.x;
  r[7] = z[DC] - au * pb.cavC.x;
  r[8] = xC - x1 - phi * v1 - pb.safety.delta;
  // alpha_u * H evaluated at tau = 0, where H is constant along the extremal
  r[9] = -0.5 * (z[BC] * z[BC] + z[B1] * z[B1]) + au * pb.weights.alpha_t +
         z[AC] * z[CC] + z[A1] * z[C1];
  return r;
}

Mat residual_jacobian(const Vec& z, const MergeAheadProblem& pb) {
  const double au = pb.alpha_u();
  const double av = pb.alpha_v();
  const double phi = pb.safety.phi;
  const double T = z[TT];
  const double T2 = T * T;
  const double T3 = T2 * T;
  // d(v)/d(a, b, c, T) and d(x)/d(a, b, c, d, T), unscaled by alpha_u
  auto dv = [&](int a, int b, int c, Eigen::Ref<Vec> row, double w) {
    row[a] += w * T2 / 2 / au;
    row[b] += w * T / au;
    row[c] += w / au;
    row[TT] += w * (z[a] * T + z[b]) / au;
  };
  auto dx = [&](int a, int b, int c, int d, Eigen::Ref<Vec> row, double w) {
    row[a] += w * T3 / 6 / au;
    row[b] += w * T2 / 2 / au;
    row[c] += w * T / au;
    row[d] += w / au;
    row[TT] += w * scaled_v(z[a], z[b], z[c], T) / au;
  };
  Mat J = Mat::Zero();
  Vec row;

  J(0, A1) = 1; J(0, NU) = 1;
  J(1, AC) = 1; J(1, NU) = -1;

  row.setZero();
  row[A1] = T; row[B1] = 1; row[TT] = z[A1]; row[NU] = -phi;
  dv(A1, B1, C1, row, av);
  J.row(2) = row.transpose();

  row.setZero();
  row[AC] = T; row[BC] = 1; row[TT] = z[AC];
  dv(AC, BC, CC, row, av);
  J.row(3) = row.transpose();

  J(4, C1) = 1; J(5, CC) = 1; J(6, D1) = 1; J(7, DC) = 1;

  row.setZero();
  dx(AC, BC, CC, DC, row, 1.0);
  dx(A1, B1, C1, D1, row, -1.0);
  dv(A1, B1, C1, row, -phi);
  J.row(8) = row.transpose();

  J(9, B1) = -z[B1]; J(9, BC) = -z[BC];
  J(9, AC) = z[CC]; J(9, CC) = z[AC];
  J(9, A1) = z[C1]; J(9, C1) = z[A1];
  return J;
}

// Row scales so every residual is compared in comparable units.
Vec residual_scale(const MergeAheadProblem& pb) {
  const double au = pb.alpha_u();
  Vec s = Vec::Ones();
  s[6] = s[7] = std::max(1.0, au * std::max(std::abs(pb.cav1.x), std::abs(pb.cavC.x)));
  return s;
}

std::optional<Vec> newton(Vec z, const MergeAheadProblem& pb, int* iterations) {
  const Vec scale = residual_scale(pb);
  Vec r = residual_vec(z, pb);
  double norm = r.cwiseQuotient(scale).norm();
  for (int it = 0; it < 100; ++it) {
    if (iterations) ++*iterations;
    if (norm <= 1e-13) break;
    const Mat J = residual_jacobian(z, pb);
    Eigen::PartialPivLU<Mat> lu(J);
    const Vec step = lu.solve(-r);
    if (!step.allFinite()) return std::nullopt;
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      Vec trial = z + t * step;
      if (trial[TT] > 0.0) {
        const Vec rt = residual_vec(trial, pb);
        const double nt = rt.cwiseQuotient(scale).norm();
        if (std::isfinite(nt) && nt <= (1.0 - 1e-4 * t) * norm) {
          z = trial;
          r = rt;
          norm = nt;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  if (!(norm <= 1e-9) || !(z[TT] > 0.0)) return std::nullopt;
  return z;
}

// With T fixed, every residual but the transversality one is affine in the
// remaining unknowns; solve those exactly.
Vec linear_seed(const MergeAheadProblem& pb, double T) {
  Vec z = Vec::Zero();
  z[TT] = T;
  const Vec r0 = residual_vec(z, pb);
  const Mat J = residual_jacobian(z, pb);
  Eigen::Matrix<double, 9, 9> A;
  Eigen::Matrix<double, 9, 1> rhs;
  const int cols[9] = {A1, B1, C1, D1, AC, BC, CC, DC, NU};
  for (int i = 0; i < 9; ++i) {
    rhs[i] = -r0[i];
    for (int j = 0; j < 9; ++j) A(i, j) = J(i, cols[j]);
  }
  const Eigen::Matrix<double, 9, 1> y = A.partialPivLu().solve(rhs);
  for (int j = 0; j < 9; ++j) z[cols[j]] = y[j];
  return z;
}

// Transversality residual along the family of linear seeds.
double transversality_at(const MergeAheadProblem& pb, double T) {
  return residual_vec(linear_seed(pb, T), pb)[9];
}

double overtaking_time(const MergeAheadProblem& pb) {
  const double gap = pb.cav1.x - pb.cavC.x + pb.safety.phi * pb.cav1.v + pb.safety.delta;
  const auto t = first_catchup_time(gap, pb.cavC.v - pb.cav1.v, pb.limits.u_max);
  return std::max(t.value_or(1.0), 0.1);
}

}  // namespace

void MergeAheadProblem::validate() const {
  weights.validate();
  scaling.validate();
  safety.validate();
  limits.validate();
  if (!(weights.alpha_u > 0.0)) throw std::invalid_argument("MergeAheadProblem: alpha_u must be > 0");
  for (double v : {t0, cav1.x, cav1.v, cavC.x, cavC.v, v_d_1, v_d_C}) {
    if (!std::isfinite(v)) throw std::invalid_argument("MergeAheadProblem: non-finite input");
  }
  if (!(T > t0 + min_duration) || !(min_duration > 0.0)) {
    throw std::invalid_argument("MergeAheadProblem: invalid horizon cap");
  }
}

PolynomialState eval_polynomial(const PolynomialSolution& s, double t) {
  const double slack = 1e-12 * std::max(1.0, std::abs(s.t_f));
  if (!(t >= s.t0 - slack && t <= s.t_f + slack)) {
    throw std::out_of_range("eval_polynomial: t outside [t0, t_f]");
  }
  const double tau = t - s.t0;
  const double au = s.alpha_u;
  return {scaled_x(s.a_1, s.b_1, s.c_1, s.d_1, tau) / au,
          scaled_v(s.a_1, s.b_1, s.c_1, tau) / au,
          (s.a_1 * tau + s.b_1) / au,
          scaled_x(s.a_C, s.b_C, s.c_C, s.d_C, tau) / au,
          scaled_v(s.a_C, s.b_C, s.c_C, tau) / au,
          (s.a_C * tau + s.b_C) / au};
}

Costates costates(const PolynomialSolution& s, double t) {
  const double tau = t - s.t0;
  return {s.a_1, -(s.a_1 * tau + s.b_1), s.a_C, -(s.a_C * tau + s.b_C)};
}

double hamiltonian(const PolynomialSolution& s, const MergeAheadProblem& pb, double t) {
  const PolynomialState st = eval_polynomial(s, t);
  const Costates l = costates(s, t);
  const double au = pb.alpha_u();
  return pb.weights.alpha_t + 0.5 * au * (st.u_1 * st.u_1 + st.u_C * st.u_C) +
         l.lx_1 * st.v_1 + l.lv_1 * st.u_1 + l.lx_C * st.v_C + l.lv_C * st.u_C;
}

std::array<double, 11> residuals(const PolynomialSolution& sol, const MergeAheadProblem& pb) {
  const Vec r = residual_vec(to_vec(sol), pb);
  std::array<double, 11> out{};
  for (int i = 0; i < kUnknowns; ++i) out[i] = r[i];
  out[10] = std::abs(hamiltonian(sol, pb, sol.t_f));
  return out;
}

namespace {

std::array<double, 2> polynomial_agent_costs(const PolynomialSolution& s,
                                             const MergeAheadProblem& pb) {
  const double T = s.t_f - s.t0;
  const double au = pb.alpha_u();
  const double av = pb.alpha_v();
  // int_0^T (a tau + b)^2 dtau
  auto sq = [T](double a, double b) { return a * a * T * T * T / 3 + a * b * T * T + b * b * T; };
  const PolynomialState end = eval_polynomial(s, s.t_f);
  const double e1 = end.v_1 - pb.v_d_1;
  const double eC = end.v_C - pb.v_d_C;
  return {sq(s.a_1, s.b_1) / (2.0 * au) + 0.5 * av * e1 * e1,
          sq(s.a_C, s.b_C) / (2.0 * au) + 0.5 * av * eC * eC};
}

}  // namespace

double polynomial_objective(const PolynomialSolution& s, const MergeAheadProblem& pb) {
  const auto c = polynomial_agent_costs(s, pb);
  return c[0] + c[1] + pb.weights.alpha_t * (s.t_f - s.t0);
}

std::optional<PolynomialSolution> solve_polynomial(const MergeAheadProblem& pb, int* iterations) {
  pb.validate();
  if (iterations) *iterations = 0;
  std::optional<PolynomialSolution> best;
  double best_J = kInf;
  auto consider = [&](const Vec& seed) {
    const auto z = newton(seed, pb, iterations);
    if (!z) return false;
    const PolynomialSolution sol = from_vec(*z, pb);
    const double J = polynomial_objective(sol, pb);
    if (J < best_J) {
      best_J = J;
      best = sol;
    }
    return true;
  };

  const double T0 = overtaking_time(pb);
  for (double jitter : {1.0, 0.5, 0.75, 1.5, 2.0, 1.25}) {
    if (consider(linear_seed(pb, jitter * T0))) break;
  }
  // The transversality residual may have several roots in T; bracket every
  // sign change on a geometric grid and keep the cheapest extremal.
  constexpr int kScan = 400;
  const double lo = 1e-3;
  const double hi = 4.0 * std::max(pb.T - pb.t0, T0);
  double T_prev = lo;
  double g_prev = transversality_at(pb, lo);
  for (int i = 1; i <= kScan; ++i) {
    const double T = lo * std::pow(hi / lo, static_cast<double>(i) / kScan);
    const double g = transversality_at(pb, T);
    if (std::isfinite(g) && std::isfinite(g_prev) && (g_prev < 0.0) != (g < 0.0)) {
      double a = T_prev, b = T, ga = g_prev;
      for (int k = 0; k < 60; ++k) {
        const double m = 0.5 * (a + b);
        const double gm = transversality_at(pb, m);
        if ((gm < 0.0) == (ga < 0.0)) {
          a = m;
          ga = gm;
        } else {
          b = m;
        }
      }
      consider(linear_seed(pb, 0.5 * (a + b)));
    }
    T_prev = T;
    g_prev = g;
  }
  return best;
}

bool bounds_inactive(const PolynomialSolution& sol, const VehicleLimits& lim) {
  constexpr int kPoints = 201;
  constexpr double kTol = 1e-9;
  for (int i = 0; i < kPoints; ++i) {
    const double t = sol.t0 + (sol.t_f - sol.t0) * i / (kPoints - 1);
    const PolynomialState s = eval_polynomial(sol, std::min(t, sol.t_f));
    for (double u : {s.u_1, s.u_C}) {
      if (u < lim.u_min - kTol || u > lim.u_max + kTol) return false;
    }
    for (double v : {s.v_1, s.v_C}) {
      if (v < lim.v_min - kTol || v > lim.v_max + kTol) return false;
    }
  }
  return true;
}

std::array<Trajectory, 2> polynomial_trajectories(const PolynomialSolution& sol, int n) {
  if (n < 2) throw std::invalid_argument("polynomial_trajectories: need at least 2 nodes");
  std::vector<Trajectory::Sample> s1, sC;
  s1.reserve(n);
  sC.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t = i + 1 == n ? sol.t_f : sol.t0 + (sol.t_f - sol.t0) * i / (n - 1);
    const PolynomialState st = eval_polynomial(sol, t);
    s1.push_back({t, st.x_1, st.v_1, st.u_1});
    sC.push_back({t, st.x_C, st.v_C, st.u_C});
  }
  return {Trajectory(std::move(s1)), Trajectory(std::move(sC))};
}

NlpSolution solve_merge_ahead_numeric(const MergeAheadProblem& pb, const OcpSolveOptions& opts,
                                      bool enforce_bounds) {
  pb.validate();
  OcpSpec spec = OcpSpec::with_free_horizon(pb.t0, pb.t0 + pb.min_duration, pb.T);
  spec.time_weight = pb.weights.alpha_t;
  auto agent = [&](const VehicleState& init, double vd) {
    AgentSpec a;
    a.init = init;
    a.limits = pb.limits;
    a.effort_weight = pb.alpha_u();
    a.terminal_speed_weight = 0.5 * pb.alpha_v();
    a.terminal_speed_target = vd;
    a.enforce_control_bounds = enforce_bounds;
    a.enforce_speed_bounds = enforce_bounds;
    return a;
  };
  spec.agents.push_back(agent(pb.cav1, pb.v_d_1));
  spec.agents.push_back(agent(pb.cavC, pb.v_d_C));
  // x_C(tf) - x_1(tf) - phi v_1(tf) - delta = 0
  spec.terminal.push_back({{{1, StateVar::X, 1.0}, {0, StateVar::X, -1.0}, {0, StateVar::V, -pb.safety.phi}},
                           0.0,
                           -pb.safety.delta,
                           ConstraintKind::Equal});
  return solve_free_time(spec, opts);
}

bool MergeAheadResult::feasible() const { return std::isfinite(objective); }

MergeAheadResult solve_merge_ahead_cav1(const MergeAheadProblem& pb, const OcpSolveOptions& opts) {
  MergeAheadResult res;
  int iters = 0;
  const auto poly = solve_polynomial(pb, &iters);
  res.newton_iterations = iters;
  if (poly) {
    res.poly = *poly;
    res.analytic_converged = true;
    res.bounds_inactive = bounds_inactive(*poly, pb.limits);
  }
  if (res.analytic_converged && res.bounds_inactive && poly->t_f <= pb.T) {
    res.objective = polynomial_objective(*poly, pb);
    res.t_f = poly->t_f;
    res.agent_costs = polynomial_agent_costs(*poly, pb);
    res.time_cost = pb.weights.alpha_t * (poly->t_f - pb.t0);
    auto trajs = polynomial_trajectories(*poly, opts.n_nodes);
    res.traj_1 = std::move(trajs[0]);
    res.traj_C = std::move(trajs[1]);
    return res;
  }
  res.used_numeric = true;
  const NlpSolution sol = solve_merge_ahead_numeric(pb, opts);
  res.numeric_status = sol.status;
  if (!sol.usable()) {
    res.objective = kInf;
    return res;
  }
  res.objective = sol.objective;
  res.t_f = sol.t_f;
  res.agent_costs = {sol.agent_costs.at(0), sol.agent_costs.at(1)};
  res.time_cost = sol.time_cost;
  res.traj_1 = sol.trajectories[0];
  res.traj_C = sol.trajectories[1];
  return res;
}

}  // namespace lanechange
