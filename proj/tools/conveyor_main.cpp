#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "conveyor/commands.hpp"
#include "conveyor/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Conveyor-belt lattice transport simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string format;
  int workers = 1;
  unsigned long long seed_val = 0;

  app.add_option("--config", config_path, "JSON run configuration")
      ->required();
  app.add_option("--out", out_dir, "output directory (default .)");
  app.add_option("--workers", workers, "parallel cells (default 1)")
      ->check(CLI::PositiveNumber);
  CLI::Option* seed_opt =
      app.add_option("--seed", seed_val, "override the config seed");
  app.add_option("--format", format, "csv or json (default from config)");

  CLI::App* sub_sweep = app.add_subcommand("sweep", "fidelity vs duration");
  CLI::App* sub_landscape =
      app.add_subcommand("landscape", "depth x duration optimization grid");
  CLI::App* sub_optimize =
      app.add_subcommand("optimize", "single trajectory optimization");
  CLI::App* sub_interf =
      app.add_subcommand("interferometer", "two-arm contrast table");
  CLI::App* sub_geometry =
      app.add_subcommand("geometry", "path-length and bound reports");
  CLI::App* sub_control =
      app.add_subcommand("control", "actuator pre-distortion");
  for (CLI::App* s : {sub_sweep, sub_landscape, sub_optimize, sub_interf,
                      sub_geometry, sub_control})
    s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    conveyor::RunConfig cfg = conveyor::load_config(config_path);
    conveyor::CommandIo io;
    io.out_dir = out_dir;
    io.workers = workers;
    io.format = format;
    if (seed_opt->count() > 0) io.seed = seed_val;

    if (sub_sweep->parsed()) return conveyor::cmd_sweep(cfg, io);
    if (sub_landscape->parsed()) return conveyor::cmd_landscape(cfg, io);
    if (sub_optimize->parsed()) return conveyor::cmd_optimize(cfg, io);
    if (sub_interf->parsed()) return conveyor::cmd_interferometer(cfg, io);
    if (sub_geometry->parsed()) return conveyor::cmd_geometry(cfg, io);
    if (sub_control->parsed()) return conveyor::cmd_control(cfg, io);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const conveyor::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const conveyor::InfeasibleError& e) {
    std::cerr << "infeasible request: " << e.what() << "\n";
    return 2;
  } catch (const conveyor::InstabilityError& e) {
    std::cerr << "numerical instability: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
