#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace lanechange {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplets = std::vector<Eigen::Triplet<double>>;

/// Smooth constrained program: min f(z) s.t. c_eq(z) = 0, c_in(z) >= 0.
///
/// Constraint vectors are stacked as [equalities; inequalities]. Hessian
/// callbacks append full (both triangles) symmetric triplets.
class NlpProblem {
 public:
  virtual ~NlpProblem() = default;

  virtual int num_variables() const = 0;
  virtual int num_equalities() const = 0;
  virtual int num_inequalities() const = 0;

  virtual double objective(const Eigen::VectorXd& z) const = 0;
  virtual void objective_gradient(const Eigen::VectorXd& z, Eigen::VectorXd& g) const = 0;
  virtual void objective_hessian(const Eigen::VectorXd& z, Triplets& out) const = 0;

  virtual void constraints(const Eigen::VectorXd& z, Eigen::VectorXd& c) const = 0;
  virtual void constraint_jacobian(const Eigen::VectorXd& z, SparseRowMatrix& J) const = 0;
  /// Appends sum_i w_i * Hessian(c_i).
  virtual void constraint_hessian(const Eigen::VectorXd& z, const Eigen::VectorXd& w,
                                  Triplets& out) const = 0;

  /// Largest step fraction in (0, 1] keeping z + a d inside the domain where
  /// the functions are defined.
  virtual double max_step(const Eigen::VectorXd& /*z*/, const Eigen::VectorXd& /*d*/) const {
    return 1.0;
  }
};

struct NlpOptions {
  double feasibility_tol = 1e-6;
  double stationarity_tol = 1e-6;
  int max_outer = 50;
  int max_inner = 100;
  double rho_init = 10.0;
  double rho_growth = 10.0;
  double rho_max = 1e8;
};

enum class NlpStatus { Converged, MaxIterations, Infeasible, Breakdown };

std::string to_string(NlpStatus s);

struct NlpResult {
  Eigen::VectorXd z;
  Eigen::VectorXd multipliers;  // [equality; inequality], sign: grad f = J^T y
  double objective = 0.0;
  double violation = 0.0;
  double stationarity = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  NlpStatus status = NlpStatus::MaxIterations;
};

/// Maximum equality residual or inequality shortfall.
double constraint_violation(const Eigen::VectorXd& c, int num_equalities);

/// Augmented-Lagrangian solver with damped Newton inner iterations.
///
/// Inner problems minimize the Powell-Hestenes-Rockafellar augmented
/// Lagrangian with exact Hessians, factored by sparse LDL^T with diagonal
/// shifts until positive definite. Outer iterations update multipliers and
/// raise the penalty when the violation does not contract. Stagnating
/// violation at the maximum penalty is reported as infeasible.
NlpResult solve_nlp(const NlpProblem& problem, const Eigen::VectorXd& z0,
                    const NlpOptions& opts = {},
                    const Eigen::VectorXd* multipliers0 = nullptr);

}  // namespace lanechange
