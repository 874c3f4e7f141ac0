#ifndef CLERAY_CONFIG_HPP_
#define CLERAY_CONFIG_HPP_

#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cleray/domain.hpp"
#include "cleray/errors.hpp"

namespace cleray {

/// Everything an experiment reads. `params` holds the experiment-specific knobs and
/// tolerances; defaults are filled in up front so the echoed config is complete.
struct ExperimentConfig {
  std::string experiment;
  std::string domain = "flat";
  double m = 1.75;
  double chart_radius = 0.5;
  int level = 5;
  std::vector<double> eps;
  std::vector<double> p_values;
  std::uint64_t seed = 1;
  std::string out = ".";
  nlohmann::json params = nlohmann::json::object();
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> n{"domain-info", "reproduce",  "boundary-limit", "decompose",
                                          "ibp-check",   "estimates", "lp-probe",       "blowup-profile"};
  return n;
}

inline ExperimentConfig default_config(const std::string& experiment) {
  using nlohmann::json;
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "domain-info") {
    c.level = 5;
    c.params = {{"ball_area_tol", 1e-4}, {"eps_max_samples", 2000}};
  } else if (experiment == "reproduce") {
    c.params = {{"coarsest_level", 3}, {"points", 20}, {"min_distance", 0.2}, {"tol", 1e-3}, {"plateaus", 1}};
  } else if (experiment == "boundary-limit") {
    c.params = {{"targets", 3},         {"eps0", 0.1},           {"steps", 6},
                {"tol", 1e-3},          {"method", "subtracted"}, {"focus_grading", 4.0},
                {"bump_center", json::array({0.0, 0.6, 0.8, 0.0})}, {"bump_radius", 0.6}};
  } else if (experiment == "decompose") {
    c.domain = "power";
    c.level = 6;
    c.eps = {0.05};
    c.params = {{"targets", 5}, {"tol", 5e-3}, {"focus_grading", 4.0}, {"bump_center", json::array({0.0, 0.6, 0.8, 0.0})},
                {"bump_radius", 0.6}};
  } else if (experiment == "ibp-check") {
    c.level = 6;
    c.params = {{"tol", 1e-3}, {"min_margin", 0.5}};
  } else if (experiment == "estimates") {
    c.eps = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    c.params = {{"samples", 100000},
                {"eps_pairs", 20000},
                {"i_first_level", 8},
                {"i_levels", 4},
                {"i_tol", 1e-3},
                {"divergence_ratio", 1.2},
                {"closed_form_tol", 1e-2},
                {"identity_tol", 1e-12},
                {"kernel_targets", 3},
                {"kernel_betas", json::array({0.0, 0.2, 0.3})},
                {"kernel_tol", 1e-2},
                {"push_level", 4},
                {"push_targets", 2},
                {"push_eps", json::array({1e-1, 1e-2, 1e-3, 1e-4})},
                {"push_min_slope", 0.15},
                {"margin_radii", json::array({0.4, 0.2, 0.1, 0.05, 0.025})},
                {"margin_centers", 12},
                {"margin_fraction", 0.5},
                {"hessian_tol", 0.05}};
  } else if (experiment == "lp-probe") {
    c.domain = "ball";
    c.level = 4;
    c.p_values = {1.0, 2.0, 4.0, std::numeric_limits<double>::infinity()};
    c.params = {{"r0", 0.15},
                {"gap", 2.0},
                {"outer", 4.0},
                {"t_count", 6},
                {"ball_variation", 2.0},
                {"homogeneity_scale", 2.5},
                {"homogeneity_tol", 1e-13},
                {"flat_u1", json::array({0.0, 0.25, 0.5})},
                {"min_increasing_run", 4}};
  } else if (experiment == "blowup-profile") {
    c.domain = "power";
    c.m = 1.25;
    c.params = {{"x1", json::array({0.2, 0.1, 0.05, 0.025, 0.0125})},
                {"v1", 0.6},
                {"bump_center", json::array({0.0, 0.6, 0.8, 0.0})},
                {"bump_radius", 0.5},
                {"eps0", 0.05},
                {"steps", 6},
                {"method", "decomposed"},
                {"focus_grading", 4.0},
                {"slope_slack", 0.15},
                {"flat_slope_tol", 0.1}};
  } else {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }
  return c;
}

inline Domain make_domain(const ExperimentConfig& c) {
  if (c.domain == "flat") return Domain::flat();
  if (c.domain == "ball") return Domain::ball();
  if (c.domain == "power") return Domain::power_m(c.m);
  throw ConfigError("unknown domain '" + c.domain + "' (expected flat, power or ball)");
}

namespace detail {

inline double config_number(const nlohmann::json& j, const std::string& key) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
  }
  throw ConfigError("config key '" + key + "' must be a number");
}

inline std::vector<double> config_numbers(const nlohmann::json& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError("config key '" + key + "' must be an array of numbers");
  std::vector<double> v;
  for (const auto& x : j) v.push_back(config_number(x, key));
  return v;
}

inline bool same_kind(const nlohmann::json& a, const nlohmann::json& b) {
  if (a.is_number_integer()) return b.is_number_integer();
  if (a.is_number() && b.is_number()) return true;
  return a.type() == b.type();
}

}  // namespace detail

/// Applies a parsed config record; unknown keys and type mismatches are errors.
inline void apply_config(ExperimentConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> keys{"experiment", "domain", "m", "chart_radius", "level", "eps", "p_values", "seed", "out", "params"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!keys.count(it.key())) throw ConfigError("unknown config key '" + it.key() + "'");
  if (j.contains("experiment") && j["experiment"] != c.experiment)
    throw ConfigError("config is for experiment '" + j["experiment"].dump() + "', not '" + c.experiment + "'");
  if (j.contains("domain")) {
    if (!j["domain"].is_string()) throw ConfigError("config key 'domain' must be a string");
    c.domain = j["domain"].get<std::string>();
  }
  if (j.contains("m")) c.m = detail::config_number(j["m"], "m");
  if (j.contains("chart_radius")) c.chart_radius = detail::config_number(j["chart_radius"], "chart_radius");
  if (j.contains("level")) {
    if (!j["level"].is_number_integer()) throw ConfigError("config key 'level' must be an integer");
    c.level = j["level"].get<int>();
  }
  if (j.contains("eps")) c.eps = detail::config_numbers(j["eps"], "eps");
  if (j.contains("p_values")) c.p_values = detail::config_numbers(j["p_values"], "p_values");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("config key 'seed' must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("out")) {
    if (!j["out"].is_string()) throw ConfigError("config key 'out' must be a string");
    c.out = j["out"].get<std::string>();
  }
  if (j.contains("params")) {
    const auto& p = j["params"];
    if (!p.is_object()) throw ConfigError("config key 'params' must be an object");
    for (auto it = p.begin(); it != p.end(); ++it) {
      if (!c.params.contains(it.key())) throw ConfigError("unknown parameter '" + it.key() + "' for " + c.experiment);
      if (!detail::same_kind(c.params[it.key()], it.value()))
        throw ConfigError("parameter '" + it.key() + "' has the wrong type");
      c.params[it.key()] = it.value();
    }
  }
}

inline void apply_config_file(ExperimentConfig& c, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  apply_config(c, j);
}

/// Range checks shared by all experiments.
inline void validate(const ExperimentConfig& c) {
  make_domain(c);
  if (c.level < 1 || c.level > 8) throw ConfigError("level must be in [1, 8], got " + std::to_string(c.level));
  if (!(c.chart_radius > 0.05 && c.chart_radius <= 1.0)) throw ConfigError("chart_radius must be in (0.05, 1]");
  for (double e : c.eps)
    if (!(e >= 0.0 && e < 1.0)) throw ConfigError("eps values must be in [0, 1)");
  for (double p : c.p_values)
    if (!(p >= 1.0)) throw ConfigError("p values must be >= 1");
  for (auto it = c.params.begin(); it != c.params.end(); ++it) {
    const auto& v = it.value();
    if (v.is_number_integer() && v.get<long long>() < 0) throw ConfigError("parameter '" + it.key() + "' must be non-negative");
    if (v.is_number_float() && !(v.get<double>() >= 0.0) && it.key() != "v1")
      throw ConfigError("parameter '" + it.key() + "' must be non-negative");
  }
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json ps = nlohmann::json::array();
  for (double p : c.p_values) ps.push_back(std::isinf(p) ? nlohmann::json("inf") : nlohmann::json(p));
  // the output directory is not part of the echo: it does not affect any number
  return {{"experiment", c.experiment}, {"domain", c.domain}, {"m", c.m},       {"chart_radius", c.chart_radius},
          {"level", c.level},           {"eps", c.eps},       {"p_values", ps}, {"seed", c.seed},
          {"params", c.params}};
}

}  // namespace cleray

#endif  // CLERAY_CONFIG_HPP_
