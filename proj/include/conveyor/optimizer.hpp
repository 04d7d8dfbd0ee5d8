#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "conveyor/grid.hpp"
#include "conveyor/lattice.hpp"
#include "conveyor/thermal.hpp"
#include "conveyor/trajectory.hpp"

namespace conveyor {

struct OptimizerConfig {
  int j_max = 0;          // 0: derive from bandwidth and tau
  bool even_only = true;
  double penalty_weight = 10.0;
  int max_evals = 1200;
  int restarts = 1;
  std::uint64_t seed = 1234;
  double tol = 1e-5;
  int search_n_radii = 5;  // reduced thermal quadrature while searching
};

struct OptimResult {
  std::vector<double> coeffs;      // full b_1..b_jmax, odd entries zero when even_only
  double fidelity = 0.0;           // objective fidelity (thermal if configured)
  double detection_fidelity = 0.0;
  int evals = 0;
  bool feasible = false;
  bool budget_exhausted = false;
  std::vector<double> trace;       // best objective fidelity, non-decreasing
  double tau = 0.0, d = 0.0;

  Trajectory trajectory() const { return Trajectory::fourier(d, tau, coeffs); }
};

OptimResult optimize(double tau, double d, const LatticeParams& p,
                     const std::optional<ThermalConfig>& thermal,
                     const FeasibilityLimits& limits,
                     const OptimizerConfig& cfg, const Grid& g, double dt);

// Same search seeded from explicit coefficients (used by the chain).
OptimResult optimize_seeded(double tau, double d, const LatticeParams& p,
                            const std::optional<ThermalConfig>& thermal,
                            const FeasibilityLimits& limits,
                            const OptimizerConfig& cfg, const Grid& g,
                            double dt, const std::vector<double>& seed_coeffs);

// Runs optimize along strictly decreasing durations, each entry seeded from
// the previous solution; the first entry seeds from the jump-ansatz projection.
std::vector<OptimResult> warm_start_chain(
    const std::vector<double>& tau_list, double d, const LatticeParams& p,
    const std::optional<ThermalConfig>& thermal,
    const FeasibilityLimits& limits, const OptimizerConfig& cfg, const Grid& g,
    double dt);

struct QslRow {
  double u0 = 0.0;
  std::vector<double> tau_over_tau_ho;
  std::vector<double> fidelity;
  std::vector<double> detection_fidelity;
  double transition_tau_over_tau_ho = 0.0;  // detection crossing of threshold
  bool crossed = false;
  double f99_tau_over_tau_ho = 0.0;  // first site-resolved F >= 0.99
  bool reached_f99 = false;
  int controlled_levels = 0;
  int bound_levels = 0;
};

struct QslScan {
  double threshold = 0.5;
  std::vector<QslRow> rows;
};

// Optimizes over the tau grid for every depth (warm chains, one per depth,
// depths in parallel up to `workers`), then interpolates where the detection
// fidelity crosses the threshold and where site-resolved F first reaches 0.99.
QslScan scan_qsl(const std::vector<double>& u0_list,
                 const std::vector<double>& tau_grid_over_tau_ho,
                 double threshold, double d,
                 const std::optional<ThermalConfig>& thermal,
                 const FeasibilityLimits& limits, const OptimizerConfig& cfg,
                 int n_sites, int workers,
                 std::optional<double> e_rec_hz = 2000.0,
                 std::optional<double> lambda_nm = 865.9);

}  // namespace conveyor
