#include "lanechange/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace lanechange {

namespace {

using nlohmann::json;

ScenarioConfig catchup_triplet() {
  ScenarioConfig c;
  c.name = "paper-defaults";
  return c;
}

ScenarioConfig level_start() {
  ScenarioConfig c;
  c.name = "table3";
  c.cavC = {0.0, 24.0};
  c.hdv = {0.0, 24.0};
  c.cav1 = {20.0, 28.0};
  c.weights.alpha_v = 0.8;
  return c;
}

// Reads known keys of one JSON object into fields, rejecting the rest.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  void num(const char* key, double& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
    out = v.get<double>();
  }
  void integer(const char* key, int& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
    out = v.get<int>();
  }
  void boolean(const char* key, bool& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
    out = v.get<bool>();
  }
  void text(const char* key, std::string& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
    out = v.get<std::string>();
  }
  void optional_num(const char* key, std::optional<double>& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (v.is_null()) {
      out.reset();
    } else if (v.is_number()) {
      out = v.get<double>();
    } else {
      throw ConfigError(where(key) + ": expected a number or null");
    }
  }
  template <class F>
  void object(const char* key, F&& read) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    ObjectReader sub(j_.at(key), where(key));
    read(sub);
    sub.finish();
  }
  void finish() const {
    for (const auto& [k, _] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError(where(k.c_str()) + ": unknown key");
    }
  }

 private:
  std::string where(const char* key) const { return path_ + "." + key; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_state(ObjectReader& r, VehicleState& s) {
  r.num("x", s.x);
  r.num("v", s.v);
}

std::string aggregation_name(DisruptionAggregation a) {
  switch (a) {
    case DisruptionAggregation::Average: return "average";
    case DisruptionAggregation::Integral: return "integral";
    case DisruptionAggregation::Terminal: return "terminal";
  }
  return "average";
}

DisruptionAggregation parse_aggregation(const std::string& s) {
  if (s == "average") return DisruptionAggregation::Average;
  if (s == "integral") return DisruptionAggregation::Integral;
  if (s == "terminal") return DisruptionAggregation::Terminal;
  throw ConfigError("disruption.aggregation: expected average, integral or terminal");
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"paper-defaults", "table1", "table2-s1", "table2-s2", "table3"};
}

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig c;
  if (name == "paper-defaults" || name == "table1" || name == "table2-s1") {
    c = catchup_triplet();
  } else if (name == "table2-s2" || name == "table3") {
    c = level_start();
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  c.name = name;
  return c;
}

ScenarioConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  std::string base = "paper-defaults";
  if (j.contains("preset")) {
    if (!j.at("preset").is_string()) throw ConfigError("config.preset: expected a string");
    base = j.at("preset").get<std::string>();
  }
  ScenarioConfig c = preset(base);
  std::string aggregation = aggregation_name(c.aggregation);

  ObjectReader r(j, "config");
  std::string ignored_preset;
  r.text("preset", ignored_preset);
  r.text("name", c.name);
  r.num("t0", c.t0);
  r.num("min_duration", c.min_duration);
  r.boolean("time_in_phase2_cost", c.time_in_phase2_cost);
  r.object("vehicles", [&](ObjectReader& v) {
    v.object("cav1", [&](ObjectReader& s) { read_state(s, c.cav1); });
    v.object("cavC", [&](ObjectReader& s) { read_state(s, c.cavC); });
    v.object("hdv", [&](ObjectReader& s) { read_state(s, c.hdv); });
  });
  r.object("limits", [&](ObjectReader& o) {
    o.num("u_min", c.limits.u_min);
    o.num("u_max", c.limits.u_max);
    o.num("v_min", c.limits.v_min);
    o.num("v_max", c.limits.v_max);
  });
  r.object("safety", [&](ObjectReader& o) {
    o.num("phi", c.safety.phi);
    o.num("delta", c.safety.delta);
  });
  r.object("weights", [&](ObjectReader& o) {
    o.num("alpha_t", c.weights.alpha_t);
    o.num("alpha_u", c.weights.alpha_u);
    o.num("alpha_v", c.weights.alpha_v);
  });
  r.object("scaling", [&](ObjectReader& o) {
    o.num("effort", c.scaling.effort);
    o.num("speed", c.scaling.speed);
  });
  r.object("hdv_profile", [&](ObjectReader& o) {
    o.num("beta_u", c.hdv_profile.beta_u);
    o.num("beta_v", c.hdv_profile.beta_v);
    o.num("beta_s", c.hdv_profile.beta_s);
    o.optional_num("v_d", c.hdv_profile.v_d_H);
    o.num("mu", c.hdv_profile.mu);
    o.num("d", c.hdv_profile.d);
  });
  r.object("disruption", [&](ObjectReader& o) {
    o.num("gamma_x", c.disruption.gamma_x);
    o.num("gamma_v", c.disruption.gamma_v);
    o.text("aggregation", aggregation);
  });
  r.object("ibr", [&](ObjectReader& o) {
    o.integer("N", c.ibr.N);
    o.num("epsilon", c.ibr.epsilon);
    o.num("lambda", c.ibr.lambda);
    o.num("T", c.ibr.T);
    o.boolean("jacobi", c.ibr.jacobi);
  });
  r.object("desired_speeds", [&](ObjectReader& o) {
    o.num("cav1", c.v_d_1);
    o.num("cavC", c.v_d_C);
  });
  r.object("solver", [&](ObjectReader& o) {
    o.integer("n_nodes", c.solve.n_nodes);
    o.num("feasibility_tol", c.solve.nlp.feasibility_tol);
    o.num("stationarity_tol", c.solve.nlp.stationarity_tol);
    o.integer("max_outer", c.solve.nlp.max_outer);
    o.integer("max_inner", c.solve.nlp.max_inner);
  });
  r.finish();
  c.aggregation = parse_aggregation(aggregation);

  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

std::string config_to_json(const ScenarioConfig& c) {
  auto state = [](const VehicleState& s) { return json{{"x", s.x}, {"v", s.v}}; };
  json j;
  j["name"] = c.name;
  j["t0"] = c.t0;
  j["min_duration"] = c.min_duration;
  j["time_in_phase2_cost"] = c.time_in_phase2_cost;
  j["vehicles"] = {{"cav1", state(c.cav1)}, {"cavC", state(c.cavC)}, {"hdv", state(c.hdv)}};
  j["limits"] = {{"u_min", c.limits.u_min}, {"u_max", c.limits.u_max},
                 {"v_min", c.limits.v_min}, {"v_max", c.limits.v_max}};
  j["safety"] = {{"phi", c.safety.phi}, {"delta", c.safety.delta}};
  j["weights"] = {{"alpha_t", c.weights.alpha_t}, {"alpha_u", c.weights.alpha_u},
                  {"alpha_v", c.weights.alpha_v}};
  j["scaling"] = {{"effort", c.scaling.effort}, {"speed", c.scaling.speed}};
  j["hdv_profile"] = {{"beta_u", c.hdv_profile.beta_u},
                      {"beta_v", c.hdv_profile.beta_v},
                      {"beta_s", c.hdv_profile.beta_s},
                      {"v_d", c.hdv_profile.v_d_H ? json(*c.hdv_profile.v_d_H) : json(nullptr)},
                      {"mu", c.hdv_profile.mu},
                      {"d", c.hdv_profile.d}};
  j["disruption"] = {{"gamma_x", c.disruption.gamma_x},
                     {"gamma_v", c.disruption.gamma_v},
                     {"aggregation", aggregation_name(c.aggregation)}};
  j["ibr"] = {{"N", c.ibr.N}, {"epsilon", c.ibr.epsilon}, {"lambda", c.ibr.lambda},
              {"T", c.ibr.T}, {"jacobi", c.ibr.jacobi}};
  j["desired_speeds"] = {{"cav1", c.v_d_1}, {"cavC", c.v_d_C}};
  j["solver"] = {{"n_nodes", c.solve.n_nodes},
                 {"feasibility_tol", c.solve.nlp.feasibility_tol},
                 {"stationarity_tol", c.solve.nlp.stationarity_tol},
                 {"max_outer", c.solve.nlp.max_outer},
                 {"max_inner", c.solve.nlp.max_inner}};
  return j.dump(2) + "\n";
}

ScenarioConfig apply_overrides(const ScenarioConfig& cfg, const std::vector<std::string>& sets) {
  if (sets.empty()) return cfg;
  json j = json::parse(config_to_json(cfg));
  for (const auto& set : sets) {
    const auto eq = set.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override '" + set + "': expected path=value");
    }
    const std::string path = set.substr(0, eq);
    const std::string literal = set.substr(eq + 1);
    json* node = &j;
    std::istringstream parts(path);
    std::string key;
    while (std::getline(parts, key, '.')) {
      if (!node->is_object() || !node->contains(key)) {
        throw ConfigError("override '" + set + "': unknown key '" + path + "'");
      }
      node = &node->at(key);
    }
    json value = json::parse(literal, nullptr, false);
    if (value.is_discarded()) value = literal;
    *node = value;
  }
  return config_from_json(j.dump());
}

ScenarioConfig load_config(const std::string& path_or_preset) {
  for (const auto& name : preset_names()) {
    if (name == path_or_preset) return preset(name);
  }
  std::ifstream in(path_or_preset);
  if (!in) throw ConfigError("cannot open config file '" + path_or_preset + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return config_from_json(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path_or_preset + ": " + e.what());
  }
}

}  // namespace lanechange
