#pragma once

#include <cstdint>
#include <random>

#include "lanechange/hamiltonian.hpp"
#include "lanechange/scenario.hpp"

namespace lanechange::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

 private:
  std::mt19937_64 gen_;
};

/// Overtaking problem with gentle effort so the bounds usually stay slack.
inline MergeAheadProblem random_merge_ahead(Rng& rng) {
  MergeAheadProblem pb;
  pb.scaling = {1.0, 12.5};
  pb.cav1 = {rng.uniform(3.0, 12.0), rng.uniform(24.0, 28.0)};
  pb.cavC = {0.0, rng.uniform(24.0, 30.0)};
  pb.weights.alpha_t = rng.uniform(0.3, 0.8);
  pb.weights.alpha_v = rng.uniform(0.2, 0.8);
  return pb;
}

/// Catch-up triplet: C behind the HDV, CAV 1 at least one headway ahead of it.
inline ScenarioConfig random_triplet(Rng& rng) {
  ScenarioConfig cfg;
  cfg.name = "random";
  cfg.cavC = {0.0, rng.uniform(20.0, 26.0)};
  cfg.hdv = {rng.uniform(0.0, 15.0), rng.uniform(22.0, 27.0)};
  cfg.cav1 = {cfg.hdv.x + safe_distance(cfg.hdv.v, cfg.safety) + rng.uniform(5.0, 30.0),
              rng.uniform(24.0, 30.0)};
  return cfg;
}

}  // namespace lanechange::testing
