#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lanechange/disruption.hpp"
#include "lanechange/hamiltonian.hpp"
#include "lanechange/hdv.hpp"
#include "lanechange/ibr.hpp"
#include "lanechange/phase1.hpp"
#include "lanechange/safety.hpp"

namespace lanechange {

/// Everything needed to evaluate both lane-change policies for one triplet.
struct ScenarioConfig {
  std::string name = "scenario";
  double t0 = 0.0;
  VehicleState cav1{30.0, 28.0};
  VehicleState cavC{0.0, 23.0};
  VehicleState hdv{10.0, 26.0};
  VehicleLimits limits;
  SafetyParams safety;
  CostWeights weights;
  /// Effort normalized by u_max^2 = 10.89 and terminal speed error by 12.5.
  CostScaling scaling{10.89, 12.5};
  HdvProfile hdv_profile;
  DisruptionWeights disruption;
  DisruptionAggregation aggregation = DisruptionAggregation::Average;
  IbrConfig ibr;
  double v_d_1 = 30.0;
  double v_d_C = 30.0;
  double min_duration = 0.05;
  bool time_in_phase2_cost = true;
  OcpSolveOptions solve;

  /// Throws std::invalid_argument on any invalid field.
  void validate() const;
  Phase1Scenario phase1() const;
  /// Phase II setup starting from the states reached at the end of Phase I.
  Phase2Setup phase2(const Phase1Outcome& p1) const;
  MergeAheadProblem merge_ahead() const;
};

enum class MergePolicy { AheadOfHdv, AheadOfCav1 };
std::string to_string(MergePolicy p);

struct PolicyReport {
  MergePolicy policy = MergePolicy::AheadOfHdv;
  bool feasible = false;
  double cost_total = 0.0;  // +inf when infeasible
  double cost_1 = 0.0;
  double cost_C = 0.0;
  double cost_H = 0.0;
  double t_f = 0.0;
  double maneuver_time = 0.0;  // t_f - t0
  double t1 = 0.0;             // end of Phase I (t0 for the merge ahead of 1)
  double hdv_disruption = 0.0;
  bool converged = false;      // IBR converged, or the analytic route was used
  int ibr_rounds = 0;
  int ibr_restarts = 0;
  std::optional<Phase1Policy> phase1_policy;
  Trajectory traj_1;
  Trajectory traj_C;
  Trajectory traj_H;
};

struct ScenarioReport {
  std::string name;
  std::vector<Phase1Outcome> phase1_outcomes;  // empty if C starts level with H
  PolicyReport ahead_hdv;
  PolicyReport ahead_cav1;
  std::optional<MergePolicy> chosen;  // nullopt when both policies failed
  std::vector<SafetyViolation> violations;  // of the chosen policy
  double runtime_ms = 0.0;

  const PolicyReport* winner() const;
};

/// C merges between CAV 1 and the HDV: Phase I catch-up, then IBR.
PolicyReport evaluate_ahead_of_hdv(const ScenarioConfig& cfg,
                                   std::vector<Phase1Outcome>* phase1_outcomes = nullptr);
/// C overtakes CAV 1; the HDV only follows CAV 1.
PolicyReport evaluate_ahead_of_cav1(const ScenarioConfig& cfg);

/// Both policies; the cheaper total (all three vehicles) wins, ties going to
/// the shorter maneuver and then to merging ahead of the HDV.
ScenarioReport evaluate_scenario(const ScenarioConfig& cfg);

/// Places CAV 1 `dist` metres ahead of the HDV.
ScenarioConfig with_dist(const ScenarioConfig& cfg, double dist);

/// Evaluates every distance; the parallel version spreads distances over
/// OpenMP threads and returns results in input order.
std::vector<ScenarioReport> dist_sweep_serial(const ScenarioConfig& cfg,
                                              std::span<const double> dists);
std::vector<ScenarioReport> dist_sweep(const ScenarioConfig& cfg, std::span<const double> dists);

enum class StudyAxis { BetaS, DesiredSpeedH, Mu };
std::string to_string(StudyAxis a);
/// Parses "beta_s", "vdh" or "mu"; nullopt otherwise.
std::optional<StudyAxis> parse_study_axis(const std::string& s);
ScenarioConfig with_axis_value(const ScenarioConfig& cfg, StudyAxis axis, double value);

struct StudyRow {
  double value;
  double dist;
  ScenarioReport report;
};
/// Cartesian product of axis values and distances, parallel over rows.
std::vector<StudyRow> parameter_study(const ScenarioConfig& cfg, StudyAxis axis,
                                      std::span<const double> values,
                                      std::span<const double> dists);

/// Smallest distance at which merging ahead of the HDV becomes the choice,
/// given reports ordered by increasing distance; nullopt if it never does.
std::optional<double> switch_threshold(std::span<const double> dists,
                                       std::span<const ScenarioReport> reports);

}  // namespace lanechange
