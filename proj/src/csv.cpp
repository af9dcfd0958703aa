#include "lanechange/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace lanechange {

namespace {

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

void close_checked(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

std::string csv_number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

double interaction_dist(const ScenarioReport& r) {
  const PolicyReport& h = r.ahead_hdv;
  if (h.feasible) return h.traj_1.at(h.t1).x - h.traj_H.at(h.t1).x;
  const PolicyReport& one = r.ahead_cav1;
  if (one.feasible) return one.traj_1.front().x - one.traj_H.front().x;
  return std::numeric_limits<double>::quiet_NaN();
}

void write_trajectory_csv(const PolicyReport& report, const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << kTrajectoryHeader << '\n';
  if (report.feasible) {
    const Trajectory trajs[3] = {report.traj_1, report.traj_C, report.traj_H};
    for (double t : merge_time_grids(trajs)) {
      if (t > report.t_f + 1e-9) break;
      out << csv_number(t);
      for (const auto& tr : trajs) {
        const auto s = tr.at(std::min(t, tr.t_end()));
        out << ',' << csv_number(s.x) << ',' << csv_number(s.v) << ',' << csv_number(s.u);
      }
      out << '\n';
    }
  }
  close_checked(out, path);
}

void write_summary_csv(std::span<const ScenarioReport> reports, const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << kSummaryHeader << '\n';
  for (const auto& r : reports) {
    const PolicyReport& h = r.ahead_hdv;
    const PolicyReport& o = r.ahead_cav1;
    out << r.name << ',' << csv_number(interaction_dist(r)) << ',' << csv_number(h.cost_total)
        << ',' << csv_number(h.cost_1) << ',' << csv_number(h.cost_C) << ','
        << csv_number(h.cost_H) << ',' << csv_number(o.cost_total) << ','
        << csv_number(o.cost_1) << ',' << csv_number(o.cost_C) << ',' << csv_number(o.cost_H)
        << ',' << csv_number(o.cost_1 + o.cost_C) << ',' << csv_number(h.hdv_disruption) << ','
        << csv_number(o.hdv_disruption) << ','
        << csv_number(h.feasible ? h.maneuver_time : INFINITY) << ','
        << csv_number(o.feasible ? o.maneuver_time : INFINITY) << ',' << csv_number(h.t1) << ','
        << (h.phase1_policy ? to_string(*h.phase1_policy) : "none") << ','
        << (r.chosen ? to_string(*r.chosen) : "aborted") << ',' << (h.converged ? 1 : 0) << ','
        << h.ibr_rounds << ',' << h.ibr_restarts << ',' << r.violations.size() << ','
        << csv_number(r.runtime_ms) << '\n';
  }
  close_checked(out, path);
}

void write_phase1_csv(std::span<const Phase1Outcome> outcomes, const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << kPhase1Header << '\n';
  for (const auto& o : outcomes) {
    out << to_string(o.policy) << ',' << csv_number(o.cost) << ','
        << csv_number(o.feasible() ? o.t1 : INFINITY) << '\n';
  }
  close_checked(out, path);
}

}  // namespace lanechange
