#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <nlohmann/json.hpp>

#include "conveyor/commands.hpp"
#include "conveyor/control.hpp"
#include "conveyor/errors.hpp"
#include "conveyor/runconfig.hpp"
#include "conveyor/trajectory.hpp"
#include "doctest.h"

using namespace conveyor;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("conveyor_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) lines.push_back(line);
  return lines;
}

std::string without_timestamps(const fs::path& p) {
  std::string out;
  for (const auto& l : read_lines(p))
    if (l.rfind("# timestamp:", 0) != 0) out += l + "\n";
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

json base_config() {
  json j;
  j["spec_version"] = 1;
  j["seed"] = 5;
  j["grid"] = {{"n_sites", 8}, {"pts_per_site", 64}};
  return j;
}

int run_binary(const std::string& args) {
  std::string cmd =
      std::string(CONVEYOR_BIN) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("config parsing accepts minimal input and rejects junk") {
  RunConfig minimal = parse_config(json{{"spec_version", 1}});
  CHECK(minimal.depth == 150.0);
  CHECK(minimal.format == "csv");
  CHECK_FALSE(minimal.thermal.has_value());

  CHECK_THROWS_AS(parse_config(json{{"spec_version", 2}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json::object()), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"spec_version", 1}, {"bogus", 3}}),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config(json{{"spec_version", 1},
                        {"lattice", {{"depht", 100.0}}}}),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config(json{{"spec_version", 1},
                        {"optimizer", {{"j_max", 1}}}}),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config(json{{"spec_version", 1},
                        {"output", {{"format", "xml"}}}}),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config(json{{"spec_version", 1}, {"lattice", {{"depth", -2.0}}}}),
      ConfigError);

  RunConfig th = parse_config(
      json{{"spec_version", 1},
           {"thermal",
            {{"t_perp_uk", 0.5}, {"nu_perp_hz", 1200.0}, {"n_radii", 4}}}});
  REQUIRE(th.thermal.has_value());
  CHECK(th.thermal->t_perp_uk == 0.5);
  CHECK(th.thermal->omega_perp_hz == 1200.0);
  CHECK(th.thermal->n_radii == 4);
}

TEST_CASE("sweep command writes tables and reruns byte-identically") {
  json j = base_config();
  j["sweep"] = {{"protocols", {"linear", "parabolic"}},
                {"tau_over_tau_ho", {2.0, 3.0}}};
  RunConfig cfg = parse_config(j);

  TempDir a, b;
  CommandIo io;
  io.workers = 2;
  io.out_dir = a.str();
  REQUIRE(cmd_sweep(cfg, io) == 0);
  io.out_dir = b.str();
  REQUIRE(cmd_sweep(cfg, io) == 0);

  auto lines = read_lines(a.path / "sweep.csv");
  REQUIRE(lines.size() == 6);  // timestamp, header, 4 cells
  CHECK(lines[0].rfind("# timestamp:", 0) == 0);
  CHECK(lines[1] ==
        "protocol,u0,tau_over_tau_ho,t_perp_uk,fidelity,detection_fidelity,"
        "status");
  double slow_parabolic = -1.0;
  for (size_t i = 2; i < lines.size(); ++i) {
    auto cells = split_csv(lines[i]);
    REQUIRE(cells.size() == 7);
    CHECK(cells[6] == "ok");
    if (cells[0] == "parabolic" && cells[2] == "3")
      slow_parabolic = std::stod(cells[4]);
  }
  CHECK(slow_parabolic > 0.9);

  CHECK(without_timestamps(a.path / "sweep.csv") ==
        without_timestamps(b.path / "sweep.csv"));
  CHECK(without_timestamps(a.path / "sweep.dat") ==
        without_timestamps(b.path / "sweep.dat"));

  SUBCASE("json output format") {
    TempDir c;
    io.out_dir = c.str();
    io.format = "json";
    REQUIRE(cmd_sweep(cfg, io) == 0);
    std::ifstream f(c.path / "sweep.json");
    json out = json::parse(f);
    REQUIRE(out.contains("rows"));
    CHECK(out["rows"].size() == 4);
    CHECK(out["rows"][0]["status"] == "ok");
  }
}

TEST_CASE("sweep reports infeasible cells and returns the partial-failure code") {
  json j = base_config();
  j["sweep"] = {{"protocols", {"ansatz"}}, {"tau_over_tau_ho", {0.5, 2.0}}};
  RunConfig cfg = parse_config(j);
  TempDir d;
  CommandIo io;
  io.out_dir = d.str();
  CHECK(cmd_sweep(cfg, io) == 4);
  auto lines = read_lines(d.path / "sweep.csv");
  REQUIRE(lines.size() == 4);  // timestamp, header, 2 cells
  int failed = 0, ok = 0;
  for (size_t i = 2; i < lines.size(); ++i) {
    auto cells = split_csv(lines[i]);
    if (cells[6].rfind("failed:", 0) == 0) {
      ++failed;
      CHECK(cells[4] == "nan");
    } else {
      ++ok;
    }
  }
  CHECK(failed == 1);  // half a trap period is below the classical bound
  CHECK(ok == 1);
}

TEST_CASE("optimize command writes summary, trajectory and trace") {
  json j = base_config();
  j["optimizer"] = {{"max_evals", 12}, {"restarts", 1}, {"j_max", 2}};
  j["optimize"] = {{"tau_over_tau_ho", 1.5}};
  RunConfig cfg = parse_config(j);
  TempDir d;
  CommandIo io;
  io.out_dir = d.str();
  REQUIRE(cmd_optimize(cfg, io) == 0);

  std::ifstream sf(d.path / "summary.json");
  json summary = json::parse(sf);
  CHECK(summary["fidelity"].get<double>() > 0.9);
  CHECK(summary["evals"].get<int>() >= 2);
  CHECK(summary["max_slew_rad_per_us"].get<double>() > 0.0);
  CHECK(summary.contains("budget_exhausted"));

  std::ifstream tf(d.path / "trajectory.json");
  Trajectory back = Trajectory::from_json(json::parse(tf));
  CHECK(back.tau() ==
        doctest::Approx(1.5 * cfg.lattice().tau_ho()).epsilon(1e-9));

  CHECK(read_lines(d.path / "trace.csv").size() >= 3);
}

TEST_CASE("landscape command writes the scan and the transition table") {
  json j = base_config();
  j["optimizer"] = {{"max_evals", 150}, {"restarts", 1}, {"j_max", 2}};
  j["landscape"] = {{"u0", {150.0}}, {"tau_over_tau_ho", {1.3, 1.1}}};
  RunConfig cfg = parse_config(j);
  TempDir d;
  CommandIo io;
  io.out_dir = d.str();
  REQUIRE(cmd_landscape(cfg, io) == 0);

  CHECK(fs::exists(d.path / "landscape.csv"));
  CHECK(fs::exists(d.path / "landscape.dat"));
  auto lines = read_lines(d.path / "transition.csv");
  REQUIRE(lines.size() == 3);
  auto header = split_csv(lines[1]);
  auto row = split_csv(lines[2]);
  REQUIRE(header.size() == row.size());
  CHECK(header[0] == "u0");
  CHECK(row[0] == "150");
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "controlled_levels") CHECK(row[i] == "6");
    if (header[i] == "bound_levels") CHECK(row[i] == "8");
    if (header[i] == "crossed") CHECK(row[i] == "0");
  }
}

TEST_CASE("control command artifacts, zero gain freezes the residual") {
  json j = base_config();
  j["control"] = {{"protocol", "parabolic"}, {"tau_over_tau_ho", 1.0},
                  {"gain", 0.0},             {"max_iter", 3},
                  {"tol", 1e-15}};
  RunConfig cfg = parse_config(j);
  TempDir d;
  CommandIo io;
  io.out_dir = d.str();
  REQUIRE(cmd_control(cfg, io) == 0);

  auto lines = read_lines(d.path / "residuals.csv");
  REQUIRE(lines.size() == 5);  // timestamp, header, 3 iterations
  auto r0 = split_csv(lines[2]);
  auto r2 = split_csv(lines[4]);
  CHECK(r0[1] == r2[1]);

  std::ifstream sf(d.path / "summary.json");
  json summary = json::parse(sf);
  CHECK(summary["converged"] == false);
  CHECK(summary["iterations"] == 3);

  std::ifstream df(d.path / "drive.csv");
  SampledSignal drive = read_signal_csv(df);
  CHECK(drive.x.size() > 100);
  std::ifstream rf(d.path / "response.csv");
  SampledSignal response = read_signal_csv(rf);
  CHECK(response.x.size() == drive.x.size());
}

TEST_CASE("binary exit codes") {
  TempDir d;
  write_file(d.path / "good.json",
             R"({"spec_version": 1,
                 "grid": {"n_sites": 8, "pts_per_site": 64},
                 "sweep": {"protocols": ["linear"], "tau_over_tau_ho": [2.0]}})");
  write_file(d.path / "bad_key.json", R"({"spec_version": 1, "bogus": true})");
  write_file(d.path / "not_json.json", "{[");

  CHECK(run_binary("--help") == 0);
  CHECK(run_binary("sweep --config " + d.str() + "/missing.json") == 2);
  CHECK(run_binary("sweep --config " + d.str() + "/bad_key.json") == 2);
  CHECK(run_binary("sweep --config " + d.str() + "/not_json.json") == 2);
  CHECK(run_binary("frobnicate --config " + d.str() + "/good.json") != 0);

  std::string out = (d.path / "out").string();
  CHECK(run_binary("sweep --config " + d.str() + "/good.json --out " + out) ==
        0);
  CHECK(fs::exists(d.path / "out" / "sweep.csv"));
  CHECK(fs::exists(d.path / "out" / "sweep.dat"));
}
