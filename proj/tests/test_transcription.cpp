#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lanechange/transcription.hpp"
#include "support.hpp"

using namespace lanechange;
using lanechange::testing::Rng;

namespace {

AgentSpec agent(VehicleState init) {
  AgentSpec a;
  a.init = init;
  a.effort_weight = 0.4;
  a.terminal_speed_weight = 0.3;
  a.terminal_speed_target = 30.0;
  a.running_speed_weight = 0.05;
  a.running_speed_target = 27.0;
  return a;
}

OcpSpec free_pair() {
  OcpSpec s = OcpSpec::with_free_horizon(1.0, 1.5, 9.0);
  s.time_weight = 0.55;
  s.agents = {agent({40.0, 28.0}), agent({0.0, 24.0})};
  s.terminal.push_back({{{0, StateVar::X, 1.0}, {1, StateVar::X, -1.0}, {1, StateVar::V, -0.6}},
                        0.0, -1.5, ConstraintKind::GreaterEqual});
  s.terminal.push_back({{{1, StateVar::X, 1.0}}, -25.0, -10.0, ConstraintKind::Equal});
  return s;
}

OcpSpec fixed_with_risk() {
  OcpSpec s = OcpSpec::with_fixed_horizon(0.0, 5.0);
  AgentSpec h = agent({0.0, 26.0});
  SigmoidPenalty pen;
  pen.weight = 0.1;
  pen.mu = 1.0;
  pen.d = 0.0;
  pen.leader = Trajectory::constant_speed({4.0, 27.0}, 0.0, 5.0, 11);
  h.sigmoid = pen;
  s.agents = {h};
  PathConstraint follow;
  follow.terms = {{0, StateVar::X, -1.0}, {0, StateVar::V, -0.6}};
  follow.external = Trajectory::constant_speed({40.0, 28.0}, 0.0, 5.0, 6);
  follow.external_x_coef = 1.0;
  follow.constant = -1.5;
  s.path.push_back(follow);
  return s;
}

Eigen::VectorXd random_point(const Transcription& tr, Rng& rng) {
  const auto& spec = tr.spec();
  std::vector<std::vector<double>> u(spec.agents.size(),
                                     std::vector<double>(tr.n_nodes() - 1));
  for (auto& row : u) {
    for (auto& x : row) x = rng.uniform(-2.0, 2.0);
  }
  const double t_f = spec.free_horizon ? rng.uniform(spec.free.t_f_min, spec.free.t_f_max)
                                       : spec.fixed.t_f;
  return tr.pack_controls(u, t_f);
}

double fd_step(double z) { return 1e-6 * std::max(1.0, std::abs(z)); }

// max_i |a_i - b_i| / max(|a|_inf, 1)
double rel_inf(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).lpNorm<Eigen::Infinity>() / std::max(1.0, a.lpNorm<Eigen::Infinity>());
}

void check_derivatives(const Transcription& tr, std::uint64_t seed, int points) {
  Rng rng(seed);
  for (int p = 0; p < points; ++p) {
    const Eigen::VectorXd z = random_point(tr, rng);
    Eigen::VectorXd c;
    tr.constraints(z, c);
    // packed controls satisfy the defects exactly
    CHECK(c.head(tr.num_equalities() - static_cast<int>(std::count_if(
                      tr.spec().terminal.begin(), tr.spec().terminal.end(),
                      [](const auto& t) { return t.kind == ConstraintKind::Equal; })))
              .lpNorm<Eigen::Infinity>() <= 1e-9);

    Eigen::VectorXd g;
    tr.objective_gradient(z, g);
    Eigen::VectorXd g_fd(z.size());
    SparseRowMatrix J;
    tr.constraint_jacobian(z, J);
    const Eigen::MatrixXd Jd = Eigen::MatrixXd(J);
    Eigen::MatrixXd J_fd(c.size(), z.size());
    for (int i = 0; i < z.size(); ++i) {
      const double h = fd_step(z[i]);
      Eigen::VectorXd zp = z, zm = z;
      zp[i] += h;
      zm[i] -= h;
      g_fd[i] = (tr.objective(zp) - tr.objective(zm)) / (2 * h);
      Eigen::VectorXd cp, cm;
      tr.constraints(zp, cp);
      tr.constraints(zm, cm);
      J_fd.col(i) = (cp - cm) / (2 * h);
    }
    CHECK(rel_inf(g, g_fd) <= 1e-5);
    for (int r = 0; r < c.size(); ++r) {
      CHECK(rel_inf(Jd.row(r).transpose(), J_fd.row(r).transpose()) <= 1e-5);
    }

    // Lagrangian Hessian against differences of the analytic gradient
    Eigen::VectorXd w = Eigen::VectorXd::Zero(c.size());
    for (int r = 0; r < c.size(); ++r) w[r] = rng.uniform(-1.0, 1.0);
    Triplets trip;
    tr.objective_hessian(z, trip);
    tr.constraint_hessian(z, w, trip);
    Eigen::SparseMatrix<double> H(z.size(), z.size());
    H.setFromTriplets(trip.begin(), trip.end());
    const Eigen::MatrixXd Hd = Eigen::MatrixXd(H);
    auto lag_grad = [&](const Eigen::VectorXd& x) {
      Eigen::VectorXd gx;
      tr.objective_gradient(x, gx);
      SparseRowMatrix Jx;
      tr.constraint_jacobian(x, Jx);
      return Eigen::VectorXd(gx + Jx.transpose() * w);
    };
    for (int i = 0; i < z.size(); ++i) {
      const double h = fd_step(z[i]);
      Eigen::VectorXd zp = z, zm = z;
      zp[i] += h;
      zm[i] -= h;
      const Eigen::VectorXd col = (lag_grad(zp) - lag_grad(zm)) / (2 * h);
      CHECK(rel_inf(Hd.col(i), col) <= 1e-5);
    }
  }
}

}  // namespace

TEST_CASE("free-horizon derivatives match central differences") {
  const Transcription tr(free_pair(), 13);
  check_derivatives(tr, 11, 10);
}

TEST_CASE("fixed-horizon derivatives with risk penalty match central differences") {
  const Transcription tr(fixed_with_risk(), 17);
  check_derivatives(tr, 12, 10);
}

TEST_CASE("constant control costs are integrated exactly") {
  const double T = 2.0, u = 1.0, v0 = 20.0;
  OcpSpec s = OcpSpec::with_fixed_horizon(0.0, T);
  AgentSpec a;
  a.init = {0.0, v0};
  a.effort_weight = 0.8;
  a.running_speed_weight = 0.5;
  a.running_speed_target = v0;
  a.terminal_speed_weight = 0.3;
  a.terminal_speed_target = v0;
  s.agents = {a};
  for (int n : {3, 5, 33}) {
    const Transcription tr(s, n);
    const Eigen::VectorXd z = tr.pack_controls({std::vector<double>(n - 1, u)}, T);
    // 0.8/2 * u^2 T + 0.5 int (u t)^2 + 0.3 (u T)^2
    const double expect = 0.4 * T + 0.5 * T * T * T / 3.0 + 0.3 * T * T;
    CHECK(tr.objective(z) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(tr.agent_cost(z, 0) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("packing and unpacking round-trip the exact motion") {
  const Transcription tr(free_pair(), 9);
  Rng rng(3);
  const Eigen::VectorXd z = random_point(tr, rng);
  const auto trajs = tr.unpack(z);
  REQUIRE(trajs.size() == 2);
  CHECK(trajs[0].t_end() == doctest::Approx(tr.final_time(z)));
  const Eigen::VectorXd z2 = tr.pack(trajs, tr.final_time(z));
  CHECK((z - z2).lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK(tr.time_cost(z) == doctest::Approx(0.55 * (tr.final_time(z) - 1.0)));
}
