#pragma once

#include <vector>

#include "lanechange/nlp_solver.hpp"
#include "lanechange/ocp.hpp"
#include "lanechange/trajectory.hpp"

namespace lanechange {

/// Direct transcription of an OcpSpec on a uniform grid of n_nodes.
///
/// Per agent the unknowns are the node states (x_k, v_k) for k >= 1 and the
/// interval controls u_k; a free horizon appends t_f. Dynamics are trapezoidal
/// defects v_{k+1} = v_k + h u_k and x_{k+1} = x_k + h (v_k + v_{k+1}) / 2,
/// which reproduce the exact flow for piecewise-constant controls. Effort and
/// running speed costs are integrated exactly on each interval; the sigmoid
/// penalty uses the trapezoid rule on the nodes.
class Transcription final : public NlpProblem {
 public:
  Transcription(OcpSpec spec, int n_nodes);

  const OcpSpec& spec() const { return spec_; }
  int n_nodes() const { return n_; }
  int num_agents() const { return static_cast<int>(spec_.agents.size()); }

  int num_variables() const override { return n_vars_; }
  int num_equalities() const override { return n_eq_; }
  int num_inequalities() const override { return n_in_; }

  double objective(const Eigen::VectorXd& z) const override;
  void objective_gradient(const Eigen::VectorXd& z, Eigen::VectorXd& g) const override;
  void objective_hessian(const Eigen::VectorXd& z, Triplets& out) const override;
  void constraints(const Eigen::VectorXd& z, Eigen::VectorXd& c) const override;
  void constraint_jacobian(const Eigen::VectorXd& z, SparseRowMatrix& J) const override;
  void constraint_hessian(const Eigen::VectorXd& z, const Eigen::VectorXd& w,
                          Triplets& out) const override;
  double max_step(const Eigen::VectorXd& z, const Eigen::VectorXd& d) const override;

  /// Per-agent objective (time cost excluded).
  double agent_cost(const Eigen::VectorXd& z, int agent) const;
  double time_cost(const Eigen::VectorXd& z) const;

  double final_time(const Eigen::VectorXd& z) const;
  double step(const Eigen::VectorXd& z) const;

  /// Free-flight guess: zero controls, constant speeds, t_f at the midpoint of
  /// its bounds for a free horizon.
  Eigen::VectorXd initial_guess() const;
  Eigen::VectorXd initial_guess(double t_f) const;

  /// Packs trajectories (resampled on this grid) into a decision vector.
  /// Controls come from the trajectories' interval controls after resampling.
  Eigen::VectorXd pack(const std::vector<Trajectory>& trajs, double t_f) const;
  /// Packs per-agent interval controls by exact simulation from the initial states.
  Eigen::VectorXd pack_controls(const std::vector<std::vector<double>>& controls,
                                double t_f) const;

  std::vector<Trajectory> unpack(const Eigen::VectorXd& z) const;

  std::vector<double> node_times(double t_f) const;

  /// Index of the first terminal-constraint row within the stacked constraints,
  /// for each terminal constraint in spec order.
  std::vector<int> terminal_rows() const { return terminal_rows_; }

  /// Largest violation of the path constraints at the first node, which the
  /// decision variables cannot influence.
  double initial_path_violation() const;

  // Variable indexing.
  int idx_u(int agent, int k) const { return agent * block_ + 3 * k; }
  int idx_x(int agent, int k) const { return agent * block_ + 3 * (k - 1) + 1; }
  int idx_v(int agent, int k) const { return agent * block_ + 3 * (k - 1) + 2; }
  int idx_tf() const { return spec_.agents.size() * block_; }

 private:
  struct Term {
    int index;      // -1 when the value is the fixed initial state
    double fixed;   // used when index < 0
  };
  Term term_x(int agent, int k) const;
  Term term_v(int agent, int k) const;
  double value(const Eigen::VectorXd& z, const Term& t) const {
    return t.index < 0 ? t.fixed : z[t.index];
  }
  double dh_dtf() const { return spec_.free_horizon ? 1.0 / (n_ - 1) : 0.0; }
  double state_term(const Eigen::VectorXd& z, const LinearTerm& t, int k) const;
  int state_index(const LinearTerm& t, int k) const;

  OcpSpec spec_;
  int n_;
  int block_;
  int n_vars_;
  int n_eq_;
  int n_in_;
  int n_terminal_eq_;
  std::vector<int> terminal_rows_;
  // external trajectory values at node times, per path constraint
  std::vector<std::vector<double>> path_external_;
  // leader positions at node times, per agent with a sigmoid penalty
  std::vector<std::vector<double>> leader_x_;
};

}  // namespace lanechange
