#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lanechange/scenario.hpp"

namespace lanechange {

/// Malformed or invalid configuration; the CLI maps it to exit code 4.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Built-in presets:
///   paper-defaults  catch-up triplet C=[0,23], 1=[30,28], H=[10,26]
///   table1, table2-s1  same as paper-defaults
///   table2-s2, table3  level start C=H=[0,24], 1=[20,28], alpha_v = 0.8
std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
ScenarioConfig preset(const std::string& name);

/// JSON document schema (every key optional, unknown keys rejected):
///
///   name, t0, min_duration, time_in_phase2_cost
///   vehicles.{cav1,cavC,hdv}.{x,v}
///   limits.{u_min,u_max,v_min,v_max}      safety.{phi,delta}
///   weights.{alpha_t,alpha_u,alpha_v}     scaling.{effort,speed}
///   hdv_profile.{beta_u,beta_v,beta_s,v_d,mu,d}   (v_d null: initial speed)
///   disruption.{gamma_x,gamma_v,aggregation}      (average|integral|terminal)
///   ibr.{N,epsilon,lambda,T,jacobi}       desired_speeds.{cav1,cavC}
///   solver.{n_nodes,feasibility_tol,stationarity_tol,max_outer,max_inner}
///   preset: name of the preset the document overrides (default paper-defaults)
ScenarioConfig config_from_json(const std::string& text);
std::string config_to_json(const ScenarioConfig& cfg);

/// Applies "a.b.c=value" assignments on top of `cfg`. Paths use the document
/// schema above and must already exist; values are JSON literals, with bare
/// words taken as strings. Throws ConfigError.
ScenarioConfig apply_overrides(const ScenarioConfig& cfg, const std::vector<std::string>& sets);

/// Reads a JSON file, or a preset when `path_or_preset` names one.
ScenarioConfig load_config(const std::string& path_or_preset);

}  // namespace lanechange
