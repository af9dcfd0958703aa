#include "lanechange/oracle.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "lanechange/transcription.hpp"

namespace lanechange {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Candidate {
  double objective = kInf;
  double t_f = 0.0;
  std::uint64_t index = 0;

  bool better_than(const Candidate& o) const {
    return objective < o.objective || (objective == o.objective && index < o.index);
  }
};

class Enumerator {
 public:
  Enumerator(const OcpSpec& spec, const OracleOptions& opts)
      : spec_(spec), opts_(opts), tr_(spec, opts.n_nodes) {
    if (opts.segments < 1) throw std::invalid_argument("oracle: segments must be >= 1");
    if (opts.segments > opts.n_nodes - 1) {
      throw std::invalid_argument("oracle: more segments than grid intervals");
    }
    if (opts.tf_grid < 2) throw std::invalid_argument("oracle: tf_grid must be >= 2");
    levels_ = opts.levels;
    if (levels_.empty()) {
      const VehicleLimits& lim = spec.agents.front().limits;
      for (int i = 0; i < 5; ++i) levels_.push_back(lim.u_min + (lim.u_max - lim.u_min) * i / 4.0);
    }
    slots_ = static_cast<int>(spec.agents.size()) * opts.segments;
    const double count = std::pow(static_cast<double>(levels_.size()), slots_);
    if (count > 1e12) throw std::invalid_argument("oracle: search space too large");
    count_ = static_cast<std::uint64_t>(std::llround(count));

    int n_equal = 0;
    const auto rows = tr_.terminal_rows();
    for (std::size_t i = 0; i < spec.terminal.size(); ++i) {
      if (spec.terminal[i].kind == ConstraintKind::Equal) {
        ++n_equal;
        eq_row_ = rows[i];
      }
    }
    if (n_equal != 1) eq_row_.reset();
  }

  std::uint64_t count() const { return count_; }

  std::vector<std::vector<double>> decode(std::uint64_t index) const {
    const int n_int = opts_.n_nodes - 1;
    std::vector<std::vector<double>> u(spec_.agents.size(), std::vector<double>(n_int));
    const std::uint64_t L = levels_.size();
    for (std::size_t a = 0; a < spec_.agents.size(); ++a) {
      for (int s = 0; s < opts_.segments; ++s) {
        const double level = levels_[index % L];
        index /= L;
        const int k0 = s * n_int / opts_.segments;
        const int k1 = (s + 1) * n_int / opts_.segments;
        for (int k = k0; k < k1; ++k) u[a][k] = level;
      }
    }
    return u;
  }

  // Objective at horizon t_f, or +inf when a constraint is violated.
  double evaluate_at(const std::vector<std::vector<double>>& u, double t_f) const {
    const Eigen::VectorXd z = tr_.pack_controls(u, t_f);
    Eigen::VectorXd c;
    tr_.constraints(z, c);
    const int n_eq = tr_.num_equalities();
    for (int i = 0; i < c.size(); ++i) {
      if (i < n_eq ? std::abs(c[i]) > opts_.eq_tol : c[i] < -opts_.ineq_tol) return kInf;
    }
    return tr_.objective(z);
  }

  double equality_residual(const std::vector<std::vector<double>>& u, double t_f) const {
    Eigen::VectorXd c;
    tr_.constraints(tr_.pack_controls(u, t_f), c);
    return c[*eq_row_];
  }

  Candidate evaluate(std::uint64_t index) const {
    Candidate cand;
    cand.index = index;
    const auto u = decode(index);
    if (!spec_.free_horizon) {
      cand.t_f = spec_.fixed.t_f;
      cand.objective = evaluate_at(u, cand.t_f);
      return cand;
    }
    const double lo = spec_.free.t_f_min;
    const double hi = spec_.free.t_f_max;
    auto grid = [&](int i) { return lo + (hi - lo) * i / (opts_.tf_grid - 1); };
    if (eq_row_) {
      double a = grid(0);
      double ra = equality_residual(u, a);
      std::optional<double> root;
      if (ra == 0.0) root = a;
      for (int i = 1; i < opts_.tf_grid && !root; ++i) {
        const double b = grid(i);
        const double rb = equality_residual(u, b);
        if (rb == 0.0) {
          root = b;
        } else if ((ra < 0.0) != (rb < 0.0)) {
          double l = a, r = b, rl = ra;
          for (int it = 0; it < 80; ++it) {
            const double m = 0.5 * (l + r);
            const double rm = equality_residual(u, m);
            if ((rm < 0.0) == (rl < 0.0)) {
              l = m;
              rl = rm;
            } else {
              r = m;
            }
          }
          root = 0.5 * (l + r);
        }
        a = b;
        ra = rb;
      }
      if (root) {
        cand.t_f = *root;
        cand.objective = evaluate_at(u, *root);
      }
      return cand;
    }
    for (int i = 0; i < opts_.tf_grid; ++i) {
      const double J = evaluate_at(u, grid(i));
      if (J < cand.objective) {
        cand.objective = J;
        cand.t_f = grid(i);
      }
    }
    return cand;
  }

  OracleResult finish(const Candidate& best, std::uint64_t feasible) const {
    OracleResult r;
    r.candidates = count_;
    r.feasible = feasible;
    r.objective = best.objective;
    if (!std::isfinite(best.objective)) return r;
    r.found = true;
    r.t_f = best.t_f;
    r.index = best.index;
    r.controls = decode(best.index);
    r.trajectories = tr_.unpack(tr_.pack_controls(r.controls, best.t_f));
    return r;
  }

 private:
  const OcpSpec& spec_;
  OracleOptions opts_;
  Transcription tr_;
  std::vector<double> levels_;
  int slots_ = 0;
  std::uint64_t count_ = 0;
  std::optional<int> eq_row_;
};

}  // namespace

OracleResult brute_force_oracle_serial(const OcpSpec& spec, const OracleOptions& opts) {
  spec.validate();
  const Enumerator e(spec, opts);
  Candidate best;
  std::uint64_t feasible = 0;
  for (std::uint64_t i = 0; i < e.count(); ++i) {
    const Candidate c = e.evaluate(i);
    if (std::isfinite(c.objective)) ++feasible;
    if (c.better_than(best)) best = c;
  }
  return e.finish(best, feasible);
}

OracleResult brute_force_oracle(const OcpSpec& spec, const OracleOptions& opts) {
  spec.validate();
  const Enumerator e(spec, opts);
  Candidate best;
  std::uint64_t feasible = 0;
  const auto n = static_cast<std::int64_t>(e.count());
#pragma omp parallel
  {
    Candidate local;
    std::uint64_t local_feasible = 0;
#pragma omp for schedule(dynamic, 64) nowait
    for (std::int64_t i = 0; i < n; ++i) {
      const Candidate c = e.evaluate(static_cast<std::uint64_t>(i));
      if (std::isfinite(c.objective)) ++local_feasible;
      if (c.better_than(local)) local = c;
    }
#pragma omp critical(lanechange_oracle_reduce)
    {
      feasible += local_feasible;
      if (local.better_than(best)) best = local;
    }
  }
  return e.finish(best, feasible);
}

}  // namespace lanechange
