#include "conveyor/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "conveyor/control.hpp"
#include "conveyor/errors.hpp"
#include "conveyor/geometry.hpp"
#include "conveyor/interferometer.hpp"
#include "conveyor/potentials.hpp"
#include "conveyor/spectrum.hpp"
#include "conveyor/thermal.hpp"

namespace conveyor {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt12(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::string iso_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Table {
  std::vector<std::string> cols;
  std::vector<json> rows;  // objects keyed by column name
};

std::string cell_text(const json& v) {
  if (v.is_null()) return "nan";
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return fmt12(v.get<double>());
  return v.get<std::string>();
}

void write_table(const fs::path& dir, const std::string& name,
                 const std::string& format, const Table& t) {
  if (format == "json") {
    json out;
    out["timestamp"] = iso_now();
    out["rows"] = json::array();
    for (const auto& r : t.rows) out["rows"].push_back(r);
    std::ofstream f(dir / (name + ".json"));
    f << out.dump(1) << "\n";
    return;
  }
  std::ofstream f(dir / (name + ".csv"));
  f << "# timestamp: " << iso_now() << "\n";
  for (size_t c = 0; c < t.cols.size(); ++c)
    f << t.cols[c] << (c + 1 < t.cols.size() ? "," : "\n");
  for (const auto& r : t.rows) {
    for (size_t c = 0; c < t.cols.size(); ++c)
      f << cell_text(r.value(t.cols[c], json()))
        << (c + 1 < t.cols.size() ? "," : "\n");
  }
}

// gnuplot companion: numeric columns only, blank-line blocks per group value
void write_dat(const fs::path& dir, const std::string& name, const Table& t,
               const std::string& group_col) {
  std::ofstream f(dir / (name + ".dat"));
  std::vector<std::string> numeric;
  for (const auto& c : t.cols) {
    if (c == group_col) continue;
    bool all_num = !t.rows.empty();
    for (const auto& r : t.rows)
      if (!r.value(c, json()).is_number() && !r.value(c, json()).is_boolean())
        all_num = false;
    if (all_num) numeric.push_back(c);
  }
  f << "#";
  for (const auto& c : numeric) f << " " << c;
  f << "\n";
  std::string current;
  bool first = true;
  for (const auto& r : t.rows) {
    std::string g =
        group_col.empty() ? "" : cell_text(r.value(group_col, json()));
    if (!first && g != current) f << "\n\n";
    if (first || g != current) {
      if (!group_col.empty()) f << "# " << group_col << " = " << g << "\n";
      current = g;
      first = false;
    }
    for (size_t c = 0; c < numeric.size(); ++c)
      f << cell_text(r.value(numeric[c], json()))
        << (c + 1 < numeric.size() ? " " : "\n");
  }
}

void parallel_cells(size_t n, int workers,
                    const std::function<void(size_t)>& body) {
  int nt = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  std::atomic<size_t> next{0};
  auto run = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      body(i);
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < nt; ++i) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
}

std::mutex g_progress_mutex;
void progress(const std::string& tag, size_t done, size_t total,
              const std::string& what) {
  std::lock_guard<std::mutex> lock(g_progress_mutex);
  std::cerr << "[" << tag << "] " << done << "/" << total << " " << what
            << "\n";
}

Trajectory make_protocol(const std::string& name, double d, double tau,
                         const LatticeParams& p) {
  if (name == "linear") return Trajectory::linear(d, tau);
  if (name == "parabolic") return Trajectory::parabolic(d, tau);
  if (name == "adiabatic" || name == "adiabatic_sine")
    return Trajectory::adiabatic_sine(d, tau);
  if (name == "ansatz" || name == "classical_ansatz")
    return Trajectory::classical_ansatz(d, tau, p);
  throw ConfigError("unknown protocol '" + name + "'");
}

const json empty_section = json::object();

const json& section_of(const RunConfig& cfg, const char* name) {
  if (cfg.sections.contains(name)) return cfg.sections[name];
  return empty_section;
}

std::vector<double> require_number_list(const json& sec, const char* key,
                                        std::vector<double> fallback) {
  if (!sec.contains(key)) {
    if (fallback.empty())
      throw ConfigError(std::string("missing required list '") + key + "'");
    return fallback;
  }
  if (!sec[key].is_array() || sec[key].empty())
    throw ConfigError(std::string("'") + key + "' must be a non-empty array");
  std::vector<double> out;
  for (const auto& v : sec[key]) {
    if (!v.is_number())
      throw ConfigError(std::string("'") + key + "' entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

fs::path prepare_out(const CommandIo& io) {
  fs::path dir(io.out_dir.empty() ? "." : io.out_dir);
  fs::create_directories(dir);
  return dir;
}

std::string pick_format(const RunConfig& cfg, const CommandIo& io) {
  if (!io.format.empty()) {
    if (io.format != "csv" && io.format != "json")
      throw ConfigError("format must be csv or json");
    return io.format;
  }
  return cfg.format;
}

}  // namespace

int cmd_sweep(const RunConfig& cfg, const CommandIo& io) {
  const json& sec = section_of(cfg, "sweep");
  reject_unknown_keys(sec, {"protocols", "tau_over_tau_ho", "distance_sites"},
                      "sweep");
  std::vector<std::string> protos{"linear"};
  if (sec.contains("protocols")) {
    protos.clear();
    for (const auto& v : sec["protocols"]) protos.push_back(v.get<std::string>());
    if (protos.empty()) throw ConfigError("sweep.protocols is empty");
  }
  std::vector<double> taus = require_number_list(sec, "tau_over_tau_ho", {});
  int sites = sec.value("distance_sites", 1);
  double d = sites * kSite;

  LatticeParams p = cfg.lattice();
  double tho = p.tau_ho();
  double dt = tho / 512.0;
  unsigned long long seed = io.seed.value_or(cfg.seed);
  double t_perp = cfg.thermal ? cfg.thermal->t_perp_uk : 0.0;

  TransportContext ctx(p, cfg.grid, d, dt);
  std::optional<ThermalSet> th;
  if (cfg.thermal) th.emplace(p, *cfg.thermal, cfg.grid, d, dt);

  struct Cell {
    std::string proto;
    double rel;
    json row;
    bool failed = false;
  };
  std::vector<Cell> cells;
  for (const auto& pr : protos)
    for (double r : taus) cells.push_back({pr, r, json::object(), false});

  std::atomic<size_t> done{0};
  parallel_cells(cells.size(), io.workers, [&](size_t i) {
    Cell& c = cells[i];
    c.row["protocol"] = c.proto;
    c.row["u0"] = p.u0;
    c.row["tau_over_tau_ho"] = c.rel;
    c.row["t_perp_uk"] = t_perp;
    try {
      double tau = c.rel * tho;
      TransportResult res;
      if (c.proto == "optimal") {
        OptimizerConfig oc = cfg.optimizer;
        oc.seed = seed + i;
        OptimResult r =
            optimize(tau, d, p, cfg.thermal, cfg.limits, oc, cfg.grid, dt);
        res.fidelity = r.fidelity;
        res.detection_fidelity = r.detection_fidelity;
      } else {
        Trajectory traj = make_protocol(c.proto, d, tau, p);
        res = cfg.thermal ? th->run(traj, true) : ctx.run(traj, true);
      }
      c.row["fidelity"] = res.fidelity;
      c.row["detection_fidelity"] = res.detection_fidelity;
      c.row["status"] = "ok";
    } catch (const std::exception& e) {
      c.failed = true;
      c.row["fidelity"] = json();
      c.row["detection_fidelity"] = json();
      c.row["status"] = std::string("failed: ") + e.what();
    }
    progress("sweep", ++done, cells.size(),
             c.proto + " tau=" + fmt12(c.rel));
  });

  Table t;
  t.cols = {"protocol", "u0",       "tau_over_tau_ho",     "t_perp_uk",
            "fidelity", "detection_fidelity", "status"};
  bool any_failed = false;
  for (auto& c : cells) {
    t.rows.push_back(std::move(c.row));
    any_failed |= c.failed;
  }
  fs::path dir = prepare_out(io);
  write_table(dir, "sweep", pick_format(cfg, io), t);
  write_dat(dir, "sweep", t, "protocol");
  return any_failed ? 4 : 0;
}

int cmd_landscape(const RunConfig& cfg, const CommandIo& io) {
  const json& sec = section_of(cfg, "landscape");
  reject_unknown_keys(sec, {"u0", "tau_over_tau_ho", "threshold",
                            "distance_sites"},
                      "landscape");
  std::vector<double> u0s =
      require_number_list(sec, "u0", {70.0, 150.0, 300.0});
  std::vector<double> taus = require_number_list(sec, "tau_over_tau_ho", {});
  double threshold = sec.value("threshold", 0.5);
  int sites = sec.value("distance_sites", 1);
  double d = sites * kSite;

  OptimizerConfig oc = cfg.optimizer;
  oc.seed = io.seed.value_or(cfg.seed);
  std::cerr << "[landscape] " << u0s.size() << " depths x " << taus.size()
            << " durations\n";
  QslScan scan = scan_qsl(u0s, taus, threshold, d, cfg.thermal, cfg.limits, oc,
                          cfg.grid.n_sites, io.workers, cfg.e_rec_hz,
                          cfg.lambda_nm);

  Table grid_t;
  grid_t.cols = {"u0", "tau_over_tau_ho", "fidelity", "detection_fidelity"};
  for (const auto& row : scan.rows)
    for (size_t k = 0; k < row.tau_over_tau_ho.size(); ++k) {
      json r;
      r["u0"] = row.u0;
      r["tau_over_tau_ho"] = row.tau_over_tau_ho[k];
      r["fidelity"] = row.fidelity[k];
      r["detection_fidelity"] = row.detection_fidelity[k];
      grid_t.rows.push_back(std::move(r));
    }

  Table tr;
  tr.cols = {"u0",          "transition_tau_over_tau_ho",
             "crossed",     "f99_tau_over_tau_ho",
             "reached_f99", "controlled_levels",
             "bound_levels"};
  for (const auto& row : scan.rows) {
    json r;
    r["u0"] = row.u0;
    r["transition_tau_over_tau_ho"] =
        row.crossed ? json(row.transition_tau_over_tau_ho) : json();
    r["crossed"] = row.crossed;
    r["f99_tau_over_tau_ho"] =
        row.reached_f99 ? json(row.f99_tau_over_tau_ho) : json();
    r["reached_f99"] = row.reached_f99;
    r["controlled_levels"] = row.controlled_levels;
    r["bound_levels"] = row.bound_levels;
    tr.rows.push_back(std::move(r));
  }

  fs::path dir = prepare_out(io);
  std::string format = pick_format(cfg, io);
  write_table(dir, "landscape", format, grid_t);
  write_dat(dir, "landscape", grid_t, "u0");
  write_table(dir, "transition", format, tr);
  return 0;
}

int cmd_optimize(const RunConfig& cfg, const CommandIo& io) {
  const json& sec = section_of(cfg, "optimize");
  reject_unknown_keys(sec, {"tau_over_tau_ho", "distance_sites"}, "optimize");
  if (!sec.contains("tau_over_tau_ho"))
    throw ConfigError("optimize needs tau_over_tau_ho");
  double rel = sec["tau_over_tau_ho"].get<double>();
  int sites = sec.value("distance_sites", 1);
  double d = sites * kSite;

  LatticeParams p = cfg.lattice();
  double tho = p.tau_ho();
  double dt = tho / 512.0;
  Grid g = cfg.grid;
  if (rel < 0.5 && g.pts_per_site < 128) g = make_grid(g.n_sites, 128);

  OptimizerConfig oc = cfg.optimizer;
  oc.seed = io.seed.value_or(cfg.seed);
  std::cerr << "[optimize] tau = " << fmt12(rel) << " tau_ho, u0 = " << p.u0
            << "\n";
  OptimResult r =
      optimize(rel * tho, d, p, cfg.thermal, cfg.limits, oc, g, dt);
  FeasibilityReport fr =
      feasibility_check(r.trajectory(), cfg.limits, p);

  fs::path dir = prepare_out(io);
  json summary;
  summary["timestamp"] = iso_now();
  summary["u0"] = p.u0;
  summary["tau"] = r.tau;
  summary["tau_over_tau_ho"] = rel;
  summary["distance_sites"] = sites;
  summary["fidelity"] = r.fidelity;
  summary["detection_fidelity"] = r.detection_fidelity;
  summary["evals"] = r.evals;
  summary["feasible"] = r.feasible;
  summary["budget_exhausted"] = r.budget_exhausted;
  summary["max_slew_rad_per_us"] = fr.max_slew_rad_per_us;
  summary["max_freq_hz"] = fr.max_freq_hz;
  {
    std::ofstream f(dir / "summary.json");
    f << summary.dump(1) << "\n";
  }
  {
    std::ofstream f(dir / "trajectory.json");
    f << r.trajectory().to_json().dump(1) << "\n";
  }
  Table trace;
  trace.cols = {"improvement", "best_fidelity"};
  for (size_t i = 0; i < r.trace.size(); ++i) {
    json row;
    row["improvement"] = static_cast<long long>(i);
    row["best_fidelity"] = r.trace[i];
    trace.rows.push_back(std::move(row));
  }
  write_table(dir, "trace", pick_format(cfg, io), trace);
  return 0;
}

int cmd_interferometer(const RunConfig& cfg, const CommandIo& io) {
  const json& sec = section_of(cfg, "interferometer");
  reject_unknown_keys(
      sec, {"tau_over_tau_ho", "protocol", "intensity_ratio", "distance_sites"},
      "interferometer");
  std::vector<double> taus =
      require_number_list(sec, "tau_over_tau_ho", {1.0, 1.5, 2.0, 3.0});
  std::string proto = sec.value("protocol", std::string("optimal"));
  double ratio = sec.value("intensity_ratio", 7.0);
  int sites = sec.value("distance_sites", 1);
  double d = sites * kSite;

  LatticeParams p = cfg.lattice();
  double tho = p.tau_ho();
  double dt = tho / 512.0;
  unsigned long long seed = io.seed.value_or(cfg.seed);
  SpinDownField field = balanced_field(p.u0, ratio);
  TransportContext ctx(p, cfg.grid, d, dt);

  struct Cell {
    double rel;
    json row;
    bool failed = false;
  };
  std::vector<Cell> cells;
  for (double r : taus) cells.push_back({r, json::object(), false});

  std::atomic<size_t> done{0};
  parallel_cells(cells.size(), io.workers, [&](size_t i) {
    Cell& c = cells[i];
    c.row["tau_over_tau_ho"] = c.rel;
    c.row["u0"] = p.u0;
    try {
      double tau = c.rel * tho;
      Trajectory traj = Trajectory::linear(d, tau);
      double fidelity = 0.0;
      if (proto == "optimal") {
        OptimizerConfig oc = cfg.optimizer;
        oc.seed = seed + i;
        OptimResult r = optimize(tau, d, p, std::nullopt, cfg.limits, oc,
                                 cfg.grid, dt);
        traj = r.trajectory();
        fidelity = r.fidelity;
      } else {
        traj = make_protocol(proto, d, tau, p);
        fidelity = ctx.run(traj, false).fidelity;
      }
      InterferometerResult on =
          interferometer_contrast(traj, p, field, true, cfg.grid, dt);
      InterferometerResult off =
          interferometer_contrast(traj, p, field, false, cfg.grid, dt);
      c.row["fidelity"] = fidelity;
      c.row["contrast"] = on.contrast;
      c.row["contrast_uncompensated"] = off.contrast;
      c.row["round_trip_fidelity"] = on.f2;
      c.row["status"] = "ok";
    } catch (const std::exception& e) {
      c.failed = true;
      c.row["status"] = std::string("failed: ") + e.what();
    }
    progress("interferometer", ++done, cells.size(), "tau=" + fmt12(c.rel));
  });

  Table t;
  t.cols = {"tau_over_tau_ho", "u0",       "fidelity",
            "contrast",        "contrast_uncompensated",
            "round_trip_fidelity", "status"};
  bool any_failed = false;
  for (auto& c : cells) {
    t.rows.push_back(std::move(c.row));
    any_failed |= c.failed;
  }
  fs::path dir = prepare_out(io);
  write_table(dir, "interferometer", pick_format(cfg, io), t);
  write_dat(dir, "interferometer", t, "");
  return any_failed ? 4 : 0;
}

int cmd_geometry(const RunConfig& cfg, const CommandIo& io) {
  const json& sec = section_of(cfg, "geometry");
  reject_unknown_keys(sec, {"tau_over_tau_ho", "protocol", "distance_sites"},
                      "geometry");
  std::vector<double> taus =
      require_number_list(sec, "tau_over_tau_ho", {1.0, 1.25, 1.5, 2.0});
  std::string proto = sec.value("protocol", std::string("optimal"));
  int sites = sec.value("distance_sites", 1);
  double d = sites * kSite;

  LatticeParams p = cfg.lattice();
  double tho = p.tau_ho();
  double dt = tho / 512.0;
  unsigned long long seed = io.seed.value_or(cfg.seed);
  TransportContext ctx(p, cfg.grid, d, dt);

  struct Cell {
    double rel;
    json row;
    json report;
    bool failed = false;
  };
  std::vector<Cell> cells;
  for (double r : taus) cells.push_back({r, json::object(), json(), false});

  std::atomic<size_t> done{0};
  parallel_cells(cells.size(), io.workers, [&](size_t i) {
    Cell& c = cells[i];
    c.row["tau_over_tau_ho"] = c.rel;
    try {
      double tau = c.rel * tho;
      Trajectory traj = Trajectory::linear(d, tau);
      if (proto == "optimal") {
        OptimizerConfig oc = cfg.optimizer;
        oc.seed = seed + i;
        OptimResult r = optimize(tau, d, p, std::nullopt, cfg.limits, oc,
                                 cfg.grid, dt);
        traj = r.trajectory();
      } else {
        traj = make_protocol(proto, d, tau, p);
      }
      LatticePotential pot(p, traj.fn(), ctx.start_center());
      GeometryRun run =
          propagate_logged(ctx.initial_state(), pot, 0.0, tau, dt);
      GeometryReport rep = bound_report(run.states, run.times, pot, traj, p,
                                        ctx.initial_state(),
                                        ctx.target_state());
      c.report = rep.to_json();
      for (auto it = c.report.begin(); it != c.report.end(); ++it)
        if (!it->is_object()) c.row[it.key()] = *it;
      c.row["tau_over_tau_ho"] = c.rel;
      c.row["status"] = "ok";
    } catch (const std::exception& e) {
      c.failed = true;
      c.row["status"] = std::string("failed: ") + e.what();
    }
    progress("geometry", ++done, cells.size(), "tau=" + fmt12(c.rel));
  });

  Table t;
  t.cols = {"tau_over_tau_ho", "ell",       "delta_e",     "ell_geo",
            "ell_qgt",         "ell_qb_est", "delta_e_upper", "tau_mt",
            "aa_residual",     "ell_over_geo", "status"};
  json reports = json::array();
  bool any_failed = false;
  for (auto& c : cells) {
    t.rows.push_back(std::move(c.row));
    if (!c.report.is_null()) reports.push_back(std::move(c.report));
    any_failed |= c.failed;
  }
  fs::path dir = prepare_out(io);
  write_table(dir, "geometry", pick_format(cfg, io), t);
  {
    json out;
    out["timestamp"] = iso_now();
    out["reports"] = std::move(reports);
    std::ofstream f(dir / "geometry_reports.json");
    f << out.dump(1) << "\n";
  }
  return any_failed ? 4 : 0;
}

int cmd_control(const RunConfig& cfg, const CommandIo& io) {
  const json& sec = section_of(cfg, "control");
  reject_unknown_keys(sec,
                      {"target_file", "kernel_file", "tau_over_tau_ho",
                       "distance_sites", "protocol", "delay_us", "cutoff_hz",
                       "dt_us", "gain", "max_iter", "tol", "noise_rms_nm",
                       "slew_limit_rad_per_us"},
                      "control");
  LatticeParams p = cfg.lattice();
  double tho = p.tau_ho();
  double dt_us = sec.value("dt_us", 0.05);

  ImpulseResponse kernel;
  if (sec.contains("kernel_file")) {
    std::ifstream kf(sec["kernel_file"].get<std::string>());
    if (!kf)
      throw ConfigError("cannot open kernel file " +
                        sec["kernel_file"].get<std::string>());
    kernel = read_kernel_csv(kf);
  } else {
    kernel = default_kernel(sec.value("delay_us", 0.4),
                            sec.value("cutoff_hz", 800e3), dt_us);
  }

  SampledSignal target;
  if (sec.contains("target_file")) {
    std::ifstream tf(sec["target_file"].get<std::string>());
    if (!tf)
      throw ConfigError("cannot open target file " +
                        sec["target_file"].get<std::string>());
    target = read_signal_csv(tf);
  } else {
    double rel = sec.value("tau_over_tau_ho", 1.0);
    int sites = sec.value("distance_sites", 1);
    std::string proto = sec.value("protocol", std::string("parabolic"));
    Trajectory traj = make_protocol(proto, sites * kSite, rel * tho, p);
    target = sample_trajectory(traj, p, kernel.dt_us);
  }

  Plant plant;
  plant.kernel = kernel;
  plant.slew_limit_rad_per_us =
      sec.value("slew_limit_rad_per_us", cfg.limits.max_slew_rad_per_us);
  plant.noise_rms_nm = sec.value("noise_rms_nm", 0.0);
  plant.lambda_nm = cfg.lambda_nm;
  plant.seed = io.seed.value_or(cfg.seed);

  double gain = sec.value("gain", 0.4);
  int max_iter = sec.value("max_iter", 10);
  double tol = sec.value("tol", 5e-4);

  std::cerr << "[control] " << target.x.size() << " samples, gain = " << gain
            << "\n";
  CompensationResult res = iterate_compensation(target, plant, gain, max_iter, tol);
  SampledSignal actual = apply_plant(res.drive, plant);

  fs::path dir = prepare_out(io);
  {
    std::ofstream f(dir / "drive.csv");
    f << "# timestamp: " << iso_now() << "\n";
    write_signal_csv(f, res.drive);
  }
  {
    std::ofstream f(dir / "response.csv");
    f << "# timestamp: " << iso_now() << "\n";
    write_signal_csv(f, actual);
  }
  Table hist;
  hist.cols = {"iteration", "max_residual_x_over_lambda", "site_fraction"};
  for (size_t i = 0; i < res.residual_history.size(); ++i) {
    json row;
    row["iteration"] = static_cast<long long>(i);
    row["max_residual_x_over_lambda"] = res.residual_history[i];
    row["site_fraction"] = res.residual_history[i] / 0.5;
    hist.rows.push_back(std::move(row));
  }
  write_table(dir, "residuals", pick_format(cfg, io), hist);
  json summary;
  summary["timestamp"] = iso_now();
  summary["converged"] = res.converged;
  summary["iterations"] = res.residual_history.size();
  summary["final_residual_site_fraction"] =
      res.residual_history.empty() ? json()
                                   : json(res.residual_history.back() / 0.5);
  std::ofstream sf(dir / "summary.json");
  sf << summary.dump(1) << "\n";
  return 0;
}

}  // namespace conveyor
