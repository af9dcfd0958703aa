#pragma once

#include <span>
#include <string>

#include "lanechange/phase1.hpp"
#include "lanechange/scenario.hpp"

namespace lanechange {

/// Header of the per-policy trajectory file.
inline constexpr const char* kTrajectoryHeader = "t,x_1,v_1,u_1,x_C,v_C,u_C,x_H,v_H,u_H";

/// Header of the policy summary file, one row per scenario.
inline constexpr const char* kSummaryHeader =
    "name,dist,hdv_total,hdv_cost_1,hdv_cost_C,hdv_cost_H,cav1_total,cav1_cost_1,"
    "cav1_cost_C,cav1_cost_H,cav1_cavs,hdv_disruption_ahead_hdv,hdv_disruption_ahead_cav1,"
    "time_ahead_hdv,time_ahead_cav1,t1,phase1_policy,chosen,ibr_converged,ibr_rounds,"
    "ibr_restarts,safety_violations,runtime_ms";

inline constexpr const char* kPhase1Header = "policy,cost,t1";

/// Gap x_1 - x_H when the HDV interaction starts (t1 of the merge ahead of the HDV).
double interaction_dist(const ScenarioReport& r);

/// All values in SI units with 6 decimals; infinite costs print as Inf.
/// Each function throws std::runtime_error naming the path on I/O failure.
void write_trajectory_csv(const PolicyReport& report, const std::string& path);
void write_summary_csv(std::span<const ScenarioReport> reports, const std::string& path);
void write_phase1_csv(std::span<const Phase1Outcome> outcomes, const std::string& path);

/// Formats one number the way the files do.
std::string csv_number(double v);

}  // namespace lanechange
