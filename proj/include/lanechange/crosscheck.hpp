#pragma once

#include <cstdint>
#include <vector>

#include "lanechange/ocp_solver.hpp"
#include "lanechange/oracle.hpp"

namespace lanechange {

/// Small catch-up problem cheap enough to enumerate: a short gap closed under
/// a 6 s cap, either by C alone or jointly with CAV 1.
OcpSpec shrunken_catchup_spec(std::uint64_t seed, bool cooperative);

struct CrossCheckCase {
  std::uint64_t seed = 0;
  bool cooperative = false;
  double solver_objective = 0.0;
  double oracle_objective = 0.0;
  double solver_t_f = 0.0;
  double oracle_t_f = 0.0;
  NlpStatus status = NlpStatus::Converged;

  /// Solver no worse than the oracle up to `rel_tol` (relative to |oracle|).
  bool dominates(double rel_tol = 0.01) const;
};

/// Runs `count` cases with seeds seed, seed+1, ...; odd seeds are cooperative.
/// Both routes share the transcription grid so objectives are comparable.
std::vector<CrossCheckCase> oracle_crosscheck(std::uint64_t seed, int count, int segments = 3,
                                              int n_nodes = 31, const NlpOptions& nlp = {});

}  // namespace lanechange
