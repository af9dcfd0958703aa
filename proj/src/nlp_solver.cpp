#include "lanechange/nlp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>

namespace lanechange {

namespace {

using Eigen::VectorXd;

struct AugmentedLagrangian {
  const NlpProblem& problem;
  int n_eq;
  int n_in;
  VectorXd lambda;  // multipliers, stacked like the constraints
  double rho;

  // Per-constraint gradient weight y_i so that grad L_A = grad f + J^T y.
  VectorXd weights(const VectorXd& c) const {
    VectorXd y(c.size());
    for (int i = 0; i < n_eq; ++i) y[i] = rho * c[i] - lambda[i];
    for (int i = n_eq; i < n_eq + n_in; ++i) y[i] = -std::max(0.0, lambda[i] - rho * c[i]);
    return y;
  }

  double value(const VectorXd& z, VectorXd& c) const {
    problem.constraints(z, c);
    double v = problem.objective(z);
    for (int i = 0; i < n_eq; ++i) v += -lambda[i] * c[i] + 0.5 * rho * c[i] * c[i];
    for (int i = n_eq; i < n_eq + n_in; ++i) {
      const double p = std::max(0.0, lambda[i] - rho * c[i]);
      v += (p * p - lambda[i] * lambda[i]) / (2.0 * rho);
    }
    return v;
  }

  void gradient(const VectorXd& z, const VectorXd& c, const SparseRowMatrix& J,
                VectorXd& g) const {
    problem.objective_gradient(z, g);
    g += J.transpose() * weights(c);
  }
};

// Newton matrix of the augmented Lagrangian: exact second-order terms plus
// rho * grad c grad c^T for equalities and active inequalities.
Eigen::SparseMatrix<double> newton_matrix(const AugmentedLagrangian& al,
                                          const VectorXd& z, const VectorXd& c,
                                          const SparseRowMatrix& J) {
  const int n = al.problem.num_variables();
  Triplets trips;
  al.problem.objective_hessian(z, trips);
  al.problem.constraint_hessian(z, al.weights(c), trips);
  Eigen::SparseMatrix<double> H(n, n);
  H.setFromTriplets(trips.begin(), trips.end());

  VectorXd active(c.size());
  for (int i = 0; i < c.size(); ++i) {
    const bool on = i < al.n_eq || al.lambda[i] - al.rho * c[i] > 0.0;
    active[i] = on ? std::sqrt(al.rho) : 0.0;
  }
  const SparseRowMatrix JA = active.asDiagonal() * J;
  const Eigen::SparseMatrix<double> JtJ = Eigen::SparseMatrix<double>(JA.transpose()) * JA;
  H += JtJ;
  return H;
}

}  // namespace

std::string to_string(NlpStatus s) {
  switch (s) {
    case NlpStatus::Converged: return "converged";
    case NlpStatus::MaxIterations: return "max-iterations";
    case NlpStatus::Infeasible: return "infeasible";
    case NlpStatus::Breakdown: return "breakdown";
  }
  return "unknown";
}

double constraint_violation(const VectorXd& c, int num_equalities) {
  double v = 0.0;
  for (int i = 0; i < c.size(); ++i) {
    v = std::max(v, i < num_equalities ? std::abs(c[i]) : -c[i]);
  }
  return v;
}

NlpResult solve_nlp(const NlpProblem& problem, const VectorXd& z0,
                    const NlpOptions& opts, const VectorXd* multipliers0) {
  const int n = problem.num_variables();
  const int n_eq = problem.num_equalities();
  const int n_in = problem.num_inequalities();
  const int m = n_eq + n_in;

  AugmentedLagrangian al{problem, n_eq, n_in, VectorXd::Zero(m), opts.rho_init};
  if (multipliers0 != nullptr && multipliers0->size() == m) {
    al.lambda = *multipliers0;
    for (int i = n_eq; i < m; ++i) al.lambda[i] = std::max(0.0, al.lambda[i]);
  }

  NlpResult res;
  res.z = z0;
  VectorXd& z = res.z;
  VectorXd c(m), c_trial(m), g(n), d(n), z_trial(n);
  SparseRowMatrix J;

  problem.constraints(z, c);
  double viol = constraint_violation(c, n_eq);
  double omega = 1e-2;
  int stagnant = 0;
  bool breakdown = false;

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Eigen::SparseMatrix<double> identity(n, n);
  identity.setIdentity();

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    res.outer_iterations = outer + 1;
    double gnorm = std::numeric_limits<double>::infinity();

    for (int inner = 0; inner < opts.max_inner; ++inner) {
      double phi = al.value(z, c);
      problem.constraint_jacobian(z, J);
      al.gradient(z, c, J, g);
      gnorm = g.lpNorm<Eigen::Infinity>();
      if (gnorm <= omega) break;
      ++res.inner_iterations;

      Eigen::SparseMatrix<double> H = newton_matrix(al, z, c, J);
      const double scale = std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
      double shift = 0.0;
      bool factored = false;
      for (int attempt = 0; attempt < 20; ++attempt) {
        Eigen::SparseMatrix<double> K = H;
        if (shift > 0.0) K += shift * identity;
        ldlt.compute(K);
        if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) {
          d = ldlt.solve(-g);
          if (d.allFinite()) {
            factored = true;
            break;
          }
        }
        shift = shift == 0.0 ? 1e-10 * scale : shift * 10.0;
      }
      if (!factored) {
        breakdown = true;
        break;
      }

      double slope = g.dot(d);
      if (!(slope < 0.0)) {
        d = -g;
        slope = -g.squaredNorm();
      }
      double alpha = std::min(1.0, problem.max_step(z, d));
      bool accepted = false;
      for (int ls = 0; ls < 40; ++ls) {
        z_trial = z + alpha * d;
        const double phi_trial = al.value(z_trial, c_trial);
        if (std::isfinite(phi_trial) && phi_trial <= phi + 1e-4 * alpha * slope) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        // no descent left at working precision; treat as inner convergence
        break;
      }
      z = z_trial;
    }
    if (breakdown) break;

    problem.constraints(z, c);
    const double viol_new = constraint_violation(c, n_eq);
    for (int i = 0; i < n_eq; ++i) al.lambda[i] -= al.rho * c[i];
    for (int i = n_eq; i < m; ++i) al.lambda[i] = std::max(0.0, al.lambda[i] - al.rho * c[i]);

    problem.constraint_jacobian(z, J);
    problem.objective_gradient(z, g);
    g -= J.transpose() * al.lambda;
    res.stationarity = g.lpNorm<Eigen::Infinity>();

    if (viol_new <= opts.feasibility_tol && res.stationarity <= opts.stationarity_tol) {
      viol = viol_new;
      res.status = NlpStatus::Converged;
      break;
    }
    if (viol_new > 0.25 * viol && viol_new > opts.feasibility_tol) {
      al.rho = std::min(opts.rho_max, al.rho * opts.rho_growth);
    }
    if (al.rho >= opts.rho_max && viol_new > 0.9 * viol && viol_new > opts.feasibility_tol) {
      if (++stagnant >= 3) {
        viol = viol_new;
        res.status = NlpStatus::Infeasible;
        break;
      }
    } else {
      stagnant = 0;
    }
    viol = viol_new;
    omega = std::max(opts.stationarity_tol, std::min(0.1 * omega, viol));
    if (viol <= opts.feasibility_tol) omega = opts.stationarity_tol;
  }

  problem.constraints(z, c);
  res.violation = constraint_violation(c, n_eq);
  res.objective = problem.objective(z);
  res.multipliers = al.lambda;
  if (breakdown) {
    res.status = NlpStatus::Breakdown;
  } else if (res.status != NlpStatus::Converged && res.status != NlpStatus::Infeasible) {
    res.status = res.violation > opts.feasibility_tol ? NlpStatus::Infeasible
                                                      : NlpStatus::MaxIterations;
  }
  return res;
}

}  // namespace lanechange
