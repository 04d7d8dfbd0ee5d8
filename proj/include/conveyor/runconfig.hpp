#pragma once

#include <optional>
#include <string>

#include "conveyor/grid.hpp"
#include "conveyor/lattice.hpp"
#include "conveyor/optimizer.hpp"
#include "conveyor/thermal.hpp"
#include "conveyor/trajectory.hpp"
#include <nlohmann/json.hpp>

namespace conveyor {

// Parsed top-level run configuration. Command-specific sections stay as raw
// JSON and are validated by the command that consumes them.
struct RunConfig {
  int spec_version = 1;
  unsigned long long seed = 1;
  double depth = 150.0;
  double e_rec_hz = 2000.0;
  double lambda_nm = 865.9;
  Grid grid;
  std::optional<ThermalConfig> thermal;
  FeasibilityLimits limits;
  OptimizerConfig optimizer;
  std::string format = "csv";
  nlohmann::json sections = nlohmann::json::object();

  LatticeParams lattice() const {
    return LatticeParams(depth, e_rec_hz, lambda_nm);
  }
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// throws ConfigError naming the first key not in the allowed list
void reject_unknown_keys(const nlohmann::json& j,
                         std::initializer_list<const char*> allowed,
                         const char* where);

}  // namespace conveyor
