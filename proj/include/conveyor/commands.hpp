#pragma once

#include <optional>
#include <string>

#include "conveyor/runconfig.hpp"

namespace conveyor {

struct CommandIo {
  std::string out_dir = ".";
  int workers = 1;
  std::string format;  // empty: take the config's output format
  std::optional<unsigned long long> seed;
};

// Each command writes its artifacts under io.out_dir and returns a process
// exit code: 0 on success, 4 when some cells failed but the run completed.
// Configuration problems throw ConfigError (exit 2 at the CLI), numerical
// divergence throws InstabilityError (exit 3).
int cmd_sweep(const RunConfig& cfg, const CommandIo& io);
int cmd_landscape(const RunConfig& cfg, const CommandIo& io);
int cmd_optimize(const RunConfig& cfg, const CommandIo& io);
int cmd_interferometer(const RunConfig& cfg, const CommandIo& io);
int cmd_geometry(const RunConfig& cfg, const CommandIo& io);
int cmd_control(const RunConfig& cfg, const CommandIo& io);

}  // namespace conveyor
