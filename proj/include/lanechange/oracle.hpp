#pragma once

#include <cstdint>
#include <vector>

#include "lanechange/ocp.hpp"
#include "lanechange/trajectory.hpp"

namespace lanechange {

/// Exhaustive search over piecewise-constant controls.
///
/// Every agent's control takes one of `levels` values on each of `segments`
/// equal slices of the transcription grid. Fixed horizons are evaluated as
/// is. A free horizon with exactly one terminal equality is resolved per
/// candidate by locating the smallest t_f in bounds where the equality holds
/// (scan then bisection); without an equality t_f is chosen from a uniform
/// grid of `tf_grid` values.
struct OracleOptions {
  int segments = 3;
  std::vector<double> levels;  // empty: 5 values spanning the control bounds
  int n_nodes = 31;
  int tf_grid = 64;
  double eq_tol = 1e-6;
  double ineq_tol = 1e-6;
};

struct OracleResult {
  bool found = false;
  double objective = 0.0;  // +inf when no candidate is feasible
  double t_f = 0.0;
  std::uint64_t index = 0;  // flat candidate index of the winner
  std::vector<std::vector<double>> controls;
  std::vector<Trajectory> trajectories;
  std::uint64_t candidates = 0;
  std::uint64_t feasible = 0;
};

/// Serial reference enumeration.
OracleResult brute_force_oracle_serial(const OcpSpec& spec, const OracleOptions& opts = {});
/// OpenMP enumeration; identical result, ties broken by the smaller flat index.
OracleResult brute_force_oracle(const OcpSpec& spec, const OracleOptions& opts = {});

}  // namespace lanechange
