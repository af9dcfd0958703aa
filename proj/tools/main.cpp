#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lanechange/config_io.hpp"
#include "lanechange/crosscheck.hpp"
#include "lanechange/csv.hpp"
#include "lanechange/scenario.hpp"

namespace fs = std::filesystem;
using namespace lanechange;

namespace {

enum Exit { kOk = 0, kInfeasible = 2, kSolverFailure = 3, kConfigError = 4 };

struct Common {
  std::string config = "paper-defaults";
  std::string out = "out";
  std::optional<int> grid;
  std::optional<double> tol;
  std::uint64_t seed = 1;
  std::string format = "csv";
  std::vector<std::string> sets;
};

std::vector<double> default_dists() {
  std::vector<double> d;
  for (int k = 20; k <= 100; k += 10) d.push_back(k);
  return d;
}

ScenarioConfig resolve(const Common& c, const std::string& fallback) {
  ScenarioConfig cfg = load_config(c.config.empty() ? fallback : c.config);
  cfg = apply_overrides(cfg, c.sets);
  if (c.grid) cfg.solve.n_nodes = *c.grid;
  if (c.tol) {
    cfg.solve.nlp.feasibility_tol = *c.tol;
    cfg.solve.nlp.stationarity_tol = *c.tol;
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

std::string out_path(const Common& c, const std::string& file) {
  fs::create_directories(c.out);
  return (fs::path(c.out) / file).string();
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

void print_policy(const PolicyReport& p) {
  std::printf("  %-14s feasible=%-3s total=%9s  J1=%9s  JC=%9s  JH=%9s  t_f-t0=%7s  disruption=%9s",
              to_string(p.policy).c_str(), yes_no(p.feasible), csv_number(p.cost_total).c_str(),
              csv_number(p.cost_1).c_str(), csv_number(p.cost_C).c_str(),
              csv_number(p.cost_H).c_str(), csv_number(p.maneuver_time).c_str(),
              csv_number(p.hdv_disruption).c_str());
  if (p.policy == MergePolicy::AheadOfHdv) {
    std::printf("  ibr_rounds=%d restarts=%d converged=%s", p.ibr_rounds, p.ibr_restarts,
                yes_no(p.converged));
  }
  std::printf("\n");
}

void print_report(const ScenarioReport& r) {
  std::printf("%s  (dist=%s, %.1f ms)\n", r.name.c_str(), csv_number(interaction_dist(r)).c_str(),
              r.runtime_ms);
  print_policy(r.ahead_hdv);
  print_policy(r.ahead_cav1);
  std::printf("  chosen: %s, safety violations: %zu\n",
              r.chosen ? to_string(*r.chosen).c_str() : "none (maneuver aborted)",
              r.violations.size());
}

int exit_for(std::span<const ScenarioReport> reports) {
  for (const auto& r : reports) {
    if (!r.chosen) return kInfeasible;
  }
  return kOk;
}

int cmd_run(const Common& c) {
  const ScenarioConfig cfg = resolve(c, "paper-defaults");
  const ScenarioReport r = evaluate_scenario(cfg);
  print_report(r);
  write_summary_csv(std::span(&r, 1), out_path(c, "summary.csv"));
  write_trajectory_csv(r.ahead_hdv, out_path(c, "trajectory_ahead_hdv.csv"));
  write_trajectory_csv(r.ahead_cav1, out_path(c, "trajectory_ahead_cav1.csv"));
  if (!r.phase1_outcomes.empty()) write_phase1_csv(r.phase1_outcomes, out_path(c, "phase1.csv"));
  return exit_for(std::span(&r, 1));
}

void print_sweep(std::span<const double> dists, std::span<const ScenarioReport> reports) {
  std::printf("%6s  %10s %8s %10s  %10s %8s %10s  %s\n", "dist", "J_ahead_H", "time_H", "disr_H",
              "J_ahead_1", "time_1", "disr_1", "chosen");
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    std::printf("%6.1f  %10s %8s %10s  %10s %8s %10s  %s\n", dists[i],
                csv_number(r.ahead_hdv.cost_total).c_str(),
                csv_number(r.ahead_hdv.maneuver_time).c_str(),
                csv_number(r.ahead_hdv.hdv_disruption).c_str(),
                csv_number(r.ahead_cav1.cost_total).c_str(),
                csv_number(r.ahead_cav1.maneuver_time).c_str(),
                csv_number(r.ahead_cav1.hdv_disruption).c_str(),
                r.chosen ? to_string(*r.chosen).c_str() : "none");
  }
  const auto th = switch_threshold(dists, reports);
  if (th) {
    std::printf("switch threshold: merge ahead of the HDV from dist = %g\n", *th);
  } else {
    std::printf("switch threshold: merging ahead of the HDV is never chosen\n");
  }
}

int cmd_sweep(const Common& c, std::vector<double> dists, bool serial) {
  const ScenarioConfig cfg = resolve(c, "table3");
  if (dists.empty()) dists = default_dists();
  const auto reports = serial ? dist_sweep_serial(cfg, dists) : dist_sweep(cfg, dists);
  print_sweep(dists, reports);
  write_summary_csv(reports, out_path(c, "sweep.csv"));
  return exit_for(reports);
}

std::vector<double> default_axis_values(StudyAxis a) {
  switch (a) {
    case StudyAxis::BetaS: return {0.1, 0.5, 1.0};
    case StudyAxis::DesiredSpeedH: return {22.0, 24.0, 26.0, 28.0};
    case StudyAxis::Mu: return {0.5, 1.0, 2.0};
  }
  return {};
}

int cmd_study(const Common& c, const std::string& axis_name, std::vector<double> values,
              std::vector<double> dists) {
  const auto axis = parse_study_axis(axis_name);
  if (!axis) throw ConfigError("unknown study axis '" + axis_name + "'");
  const ScenarioConfig cfg = resolve(c, "table3");
  if (values.empty()) values = default_axis_values(*axis);
  if (dists.empty()) dists = default_dists();
  auto rows = parameter_study(cfg, *axis, values, dists);
  std::vector<ScenarioReport> reports;
  std::printf("%8s %6s  %10s %10s  %10s %10s  %s\n", to_string(*axis).c_str(), "dist",
              "J_ahead_H", "disr_H", "J_ahead_1", "disr_1", "chosen");
  for (auto& row : rows) {
    const auto& r = row.report;
    std::printf("%8g %6g  %10s %10s  %10s %10s  %s\n", row.value, row.dist,
                csv_number(r.ahead_hdv.cost_total).c_str(),
                csv_number(r.ahead_hdv.hdv_disruption).c_str(),
                csv_number(r.ahead_cav1.cost_total).c_str(),
                csv_number(r.ahead_cav1.hdv_disruption).c_str(),
                r.chosen ? to_string(*r.chosen).c_str() : "none");
    row.report.name = to_string(*axis) + "=" + csv_number(row.value);
    reports.push_back(row.report);
  }
  write_summary_csv(reports, out_path(c, "study_" + to_string(*axis) + ".csv"));
  return exit_for(reports);
}

const char* verdict(bool ok) { return ok ? "match" : "differs"; }

int reproduce_table1(const Common& c) {
  const ScenarioConfig cfg = resolve(c, "table1");
  std::vector<Phase1Outcome> outcomes;
  const PolicyReport p = evaluate_ahead_of_hdv(cfg, &outcomes);
  struct Expect {
    Phase1Policy policy;
    const char* cost;
    const char* t1;
  };
  const Expect expect[] = {{Phase1Policy::Noncooperative, "Inf", "Inf"},
                           {Phase1Policy::ConstantAccel, "2.73", "3.53"},
                           {Phase1Policy::Cooperative, "2.99", "4.18"}};
  std::printf("Phase I policies (%s)\n", cfg.name.c_str());
  std::printf("  %-16s %10s %10s   %10s %10s\n", "policy", "cost", "t1", "exp. cost", "exp. t1");
  for (const auto& o : outcomes) {
    for (const auto& e : expect) {
      if (e.policy != o.policy) continue;
      std::printf("  %-16s %10s %10s   %10s %10s\n", to_string(o.policy).c_str(),
                  csv_number(o.cost).c_str(), csv_number(o.feasible() ? o.t1 : INFINITY).c_str(),
                  e.cost, e.t1);
    }
  }
  std::printf("  selected: %s (expected constant-accel)\n",
              p.phase1_policy ? to_string(*p.phase1_policy).c_str() : "none");
  for (const auto& o : outcomes) {
    if (!p.phase1_policy || o.policy != *p.phase1_policy) continue;
    const VehicleState C = o.cavC_at_t1(), one = o.cav1_at_t1(), H = o.hdv_at_t1();
    std::printf("  handoff at t1=%.4f: x_C=%.2f v_C=%.2f x_1=%.2f v_1=%.2f x_H=%.2f v_H=%.2f\n",
                o.t1, C.x, C.v, one.x, one.v, H.x, H.v);
    std::printf("  expected handoff:     x_C=101.92 v_C=34.67 x_1=128.99 v_1=28.00 x_H=101.92 "
                "v_H=26.00\n");
  }
  write_phase1_csv(outcomes, out_path(c, "table1.csv"));
  return kOk;
}

int reproduce_table2(const Common& c) {
  std::vector<ScenarioReport> reports;
  struct Expect {
    const char* preset;
    MergePolicy chosen;
    double time_hdv;
    double time_cav1;
  };
  const Expect expect[] = {{"table2-s1", MergePolicy::AheadOfHdv, 5.74, 6.06},
                           {"table2-s2", MergePolicy::AheadOfCav1, 3.41, 5.29}};
  for (const auto& e : expect) {
    // Both scenarios come from presets; --set, --grid and --tol still apply.
    Common local = c;
    local.config = e.preset;
    const ScenarioReport r = evaluate_scenario(resolve(local, e.preset));
    print_report(r);
    std::printf("  expected: chosen %s [%s], times %.2f / %.2f [%s / %s]\n",
                to_string(e.chosen).c_str(), verdict(r.chosen == e.chosen), e.time_hdv,
                e.time_cav1, verdict(std::abs(r.ahead_hdv.maneuver_time - e.time_hdv) <= 0.15),
                verdict(std::abs(r.ahead_cav1.maneuver_time - e.time_cav1) <= 0.15));
    write_trajectory_csv(r.ahead_hdv, out_path(c, std::string(e.preset) + "_ahead_hdv.csv"));
    write_trajectory_csv(r.ahead_cav1, out_path(c, std::string(e.preset) + "_ahead_cav1.csv"));
    reports.push_back(r);
  }
  write_summary_csv(reports, out_path(c, "table2.csv"));
  return exit_for(reports);
}

int reproduce_table3(const Common& c) {
  const ScenarioConfig cfg = resolve(c, "table3");
  const auto dists = default_dists();
  const auto reports = dist_sweep(cfg, dists);
  print_sweep(dists, reports);
  std::printf("expected: threshold in (30, 40]; ahead-of-1 totals 3.99 4.35 4.69 5.01 5.32 5.62 "
              "5.91 6.19 6.46\n");
  write_summary_csv(reports, out_path(c, "table3.csv"));
  return exit_for(reports);
}

int cmd_oracle(const Common& c, int count, int segments) {
  NlpOptions nlp;
  if (c.tol) nlp.feasibility_tol = nlp.stationarity_tol = *c.tol;
  const int n_nodes = c.grid.value_or(31);
  const auto cases = oracle_crosscheck(c.seed, count, segments, n_nodes, nlp);
  bool all = true;
  std::printf("%6s %6s  %12s %8s  %12s %8s  %s\n", "seed", "coop", "solver", "t_f", "oracle", "t_f",
              "result");
  for (const auto& k : cases) {
    const bool ok = k.dominates(0.01);
    all = all && ok;
    std::printf("%6llu %6s  %12.6f %8.4f  %12.6f %8.4f  %s\n",
                static_cast<unsigned long long>(k.seed), yes_no(k.cooperative), k.solver_objective,
                k.solver_t_f, k.oracle_objective, k.oracle_t_f, ok ? "ok" : "WORSE");
  }
  std::printf("%s: solver within 1%% of the exhaustive search on %zu cases\n",
              all ? "PASS" : "FAIL", cases.size());
  return all ? kOk : kSolverFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal lane-change planner for a CAV merging next to a human-driven vehicle"};
  app.require_subcommand(1);
  app.fallthrough();

  Common c;
  c.config.clear();
  app.add_option("--config", c.config, "JSON config file or preset name")
      ->type_name("FILE|PRESET");
  app.add_option("--out", c.out, "Output directory for CSV files")->capture_default_str();
  app.add_option("--grid", c.grid, "Transcription nodes per solve")->check(CLI::Range(3, 100000));
  app.add_option("--tol", c.tol, "NLP feasibility and stationarity tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "First seed of randomized suites")->capture_default_str();
  app.add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"csv"}))
      ->capture_default_str();
  app.add_option("--set", c.sets, "Override one config key, e.g. --set weights.alpha_t=0.5");

  auto* run = app.add_subcommand("run", "Evaluate both policies for one scenario");

  std::vector<double> dists;
  bool serial = false;
  auto* sweep = app.add_subcommand("sweep-dist", "Sweep the CAV 1 to HDV gap");
  sweep->add_option("--dists", dists, "Gap values in m (default 20,30,...,100)")->delimiter(',');
  sweep->add_flag("--serial", serial, "Evaluate on one thread");

  std::string axis;
  std::vector<double> values;
  auto* study = app.add_subcommand("study", "Vary one HDV parameter across the gap sweep");
  study->add_option("--axis", axis, "Parameter to vary")
      ->required()
      ->check(CLI::IsMember({"beta_s", "vdh", "mu"}));
  study->add_option("--values", values, "Axis values (comma separated)")->delimiter(',');
  study->add_option("--dists", dists, "Gap values in m")->delimiter(',');

  int table = 0;
  auto* reproduce = app.add_subcommand("reproduce", "Rebuild one of the reference tables");
  reproduce->add_option("--table", table, "Table number")
      ->required()
      ->check(CLI::IsMember({1, 2, 3}));

  int count = 10;
  int segments = 3;
  auto* oracle = app.add_subcommand("oracle-check", "Compare the solver with exhaustive search");
  oracle->add_option("--count", count, "Number of random cases")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  oracle->add_option("--segments", segments, "Control segments per agent")
      ->check(CLI::Range(1, 6))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*run) return cmd_run(c);
    if (*sweep) return cmd_sweep(c, dists, serial);
    if (*study) return cmd_study(c, axis, values, dists);
    if (*reproduce) {
      if (table == 1) return reproduce_table1(c);
      if (table == 2) return reproduce_table2(c);
      return reproduce_table3(c);
    }
    if (*oracle) return cmd_oracle(c, count, segments);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return kSolverFailure;
  }
  return kOk;
}
