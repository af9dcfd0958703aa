#pragma once

#include <stdexcept>

namespace lanechange {

/// Travel-time, effort and terminal-speed weights shared by the CAV problems.
struct CostWeights {
  double alpha_t = 0.55;
  double alpha_u = 0.2;
  double alpha_v = 0.25;

  void validate() const {
    if (!(alpha_t >= 0.0 && alpha_u >= 0.0 && alpha_v >= 0.0)) {
      throw std::invalid_argument("CostWeights: weights must be >= 0");
    }
  }
};

/// Normalization of the quadratic cost terms: the effort integrand becomes
/// (alpha_u / effort) u^2 / 2 and every speed-deviation term is divided by
/// `speed`. Both equal to 1 leaves the weights as raw multipliers.
struct CostScaling {
  double effort = 1.0;
  double speed = 1.0;

  void validate() const {
    if (!(effort > 0.0 && speed > 0.0)) {
      throw std::invalid_argument("CostScaling: scales must be > 0");
    }
  }
};

}  // namespace lanechange
