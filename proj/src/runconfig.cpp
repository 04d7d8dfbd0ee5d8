#include "conveyor/runconfig.hpp"

#include <fstream>
#include <set>
#include <string>

#include "conveyor/errors.hpp"

namespace conveyor {

namespace {

using nlohmann::json;

double num_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number())
    throw ConfigError(std::string("config key '") + key + "' must be a number");
  return j[key].get<double>();
}

int int_or(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer())
    throw ConfigError(std::string("config key '") + key +
                      "' must be an integer");
  return j[key].get<int>();
}

bool bool_or(const json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean())
    throw ConfigError(std::string("config key '") + key + "' must be a bool");
  return j[key].get<bool>();
}

}  // namespace

void reject_unknown_keys(const json& j,
                         std::initializer_list<const char*> allowed,
                         const char* where) {
  if (!j.is_object())
    throw ConfigError(std::string(where) + " must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key()))
      throw ConfigError(std::string("unknown key '") + it.key() + "' in " +
                        where);
}

RunConfig parse_config(const json& j) {
  reject_unknown_keys(j,
                      {"spec_version", "seed", "lattice", "grid", "thermal",
                       "limits", "optimizer", "output", "sweep", "landscape",
                       "optimize", "interferometer", "geometry", "control"},
                      "config root");
  RunConfig c;
  if (!j.contains("spec_version"))
    throw ConfigError("config needs a spec_version field");
  c.spec_version = j["spec_version"].get<int>();
  if (c.spec_version != 1)
    throw ConfigError("unsupported spec_version " +
                      std::to_string(c.spec_version));
  if (j.contains("seed")) c.seed = j["seed"].get<unsigned long long>();

  if (j.contains("lattice")) {
    const json& l = j["lattice"];
    reject_unknown_keys(l, {"depth", "e_rec_hz", "lambda_nm"}, "lattice");
    c.depth = num_or(l, "depth", c.depth);
    c.e_rec_hz = num_or(l, "e_rec_hz", c.e_rec_hz);
    c.lambda_nm = num_or(l, "lambda_nm", c.lambda_nm);
  }
  if (!(c.depth > 0.0)) throw ConfigError("lattice depth must be positive");

  if (j.contains("grid")) {
    const json& g = j["grid"];
    reject_unknown_keys(g, {"n_sites", "pts_per_site"}, "grid");
    c.grid = make_grid(int_or(g, "n_sites", 16), int_or(g, "pts_per_site", 64));
  }

  if (j.contains("thermal") && !j["thermal"].is_null()) {
    const json& t = j["thermal"];
    reject_unknown_keys(t, {"t_perp_uk", "nu_perp_hz", "waist_um", "n_radii"},
                        "thermal");
    ThermalConfig tc;
    tc.t_perp_uk = num_or(t, "t_perp_uk", 1.0);
    tc.omega_perp_hz = num_or(t, "nu_perp_hz", tc.omega_perp_hz);
    tc.waist_um = num_or(t, "waist_um", tc.waist_um);
    tc.n_radii = int_or(t, "n_radii", tc.n_radii);
    if (!(tc.t_perp_uk >= 0.0)) throw ConfigError("t_perp_uk must be >= 0");
    if (tc.n_radii < 1) throw ConfigError("n_radii must be >= 1");
    c.thermal = tc;
  }

  if (j.contains("limits")) {
    const json& l = j["limits"];
    reject_unknown_keys(l, {"max_slew_rad_per_us", "bandwidth_hz"}, "limits");
    c.limits.max_slew_rad_per_us =
        num_or(l, "max_slew_rad_per_us", c.limits.max_slew_rad_per_us);
    c.limits.bandwidth_hz = num_or(l, "bandwidth_hz", c.limits.bandwidth_hz);
    if (!(c.limits.max_slew_rad_per_us > 0.0))
      throw ConfigError("max_slew_rad_per_us must be positive");
  }

  if (j.contains("optimizer")) {
    const json& o = j["optimizer"];
    reject_unknown_keys(o,
                        {"j_max", "even_only", "penalty_weight", "max_evals",
                         "restarts", "seed", "tol", "search_n_radii"},
                        "optimizer");
    c.optimizer.j_max = int_or(o, "j_max", c.optimizer.j_max);
    if (c.optimizer.j_max != 0 && c.optimizer.j_max < 2)
      throw ConfigError("optimizer j_max must be >= 2 (or 0 for automatic)");
    c.optimizer.even_only = bool_or(o, "even_only", c.optimizer.even_only);
    c.optimizer.penalty_weight =
        num_or(o, "penalty_weight", c.optimizer.penalty_weight);
    c.optimizer.max_evals = int_or(o, "max_evals", c.optimizer.max_evals);
    c.optimizer.restarts = int_or(o, "restarts", c.optimizer.restarts);
    if (o.contains("seed"))
      c.optimizer.seed = o["seed"].get<unsigned long long>();
    c.optimizer.tol = num_or(o, "tol", c.optimizer.tol);
    c.optimizer.search_n_radii =
        int_or(o, "search_n_radii", c.optimizer.search_n_radii);
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    reject_unknown_keys(o, {"format"}, "output");
    if (o.contains("format")) c.format = o["format"].get<std::string>();
    if (c.format != "csv" && c.format != "json")
      throw ConfigError("output format must be csv or json");
  }

  for (const char* key :
       {"sweep", "landscape", "optimize", "interferometer", "geometry",
        "control"})
    if (j.contains(key)) c.sections[key] = j[key];
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace conveyor
