#include <cmath>
#include <vector>

#include "conveyor/errors.hpp"
#include "conveyor/grid.hpp"
#include "conveyor/lattice.hpp"
#include "conveyor/optimizer.hpp"
#include "conveyor/spectrum.hpp"
#include "conveyor/transport.hpp"
#include "doctest.h"

using namespace conveyor;

namespace {
const LatticeParams p150(150.0, 2000.0, 865.9);
const Grid g16 = make_grid(16, 64);
const FeasibilityLimits lims;

OptimizerConfig quick(int evals, unsigned long long seed = 42) {
  OptimizerConfig c;
  c.max_evals = evals;
  c.seed = seed;
  return c;
}
}

TEST_CASE("optimization beats its seed and stays deterministic") {
  double tho = p150.tau_ho();
  double tau = 1.5 * tho;
  double dt = tho / 512;

  OptimResult a = optimize(tau, kSite, p150, std::nullopt, lims, quick(140),
                           g16, dt);
  OptimResult b = optimize(tau, kSite, p150, std::nullopt, lims, quick(140),
                           g16, dt);
  CHECK(a.fidelity == b.fidelity);
  REQUIRE(a.coeffs.size() == b.coeffs.size());
  for (size_t i = 0; i < a.coeffs.size(); ++i)
    CHECK(a.coeffs[i] == b.coeffs[i]);

  // at least as good as the projected jump ansatz
  TransportContext ctx(p150, g16, kSite, dt);
  Trajectory seed = Trajectory::fourier(
      kSite, tau,
      project_to_fourier(Trajectory::classical_ansatz(kSite, tau, p150), 8));
  double f_seed = ctx.run(seed, false).fidelity;
  CHECK(a.fidelity >= f_seed - 1e-5);
  CHECK(a.fidelity > 0.99);
  CHECK(a.feasible);

  SUBCASE("trace is a non-decreasing best-so-far record") {
    REQUIRE(!a.trace.empty());
    for (size_t i = 1; i < a.trace.size(); ++i)
      CHECK(a.trace[i] >= a.trace[i - 1]);
    CHECK(a.trace.back() == doctest::Approx(a.fidelity).epsilon(1e-9));
  }
  SUBCASE("even-only parameterization leaves odd coefficients at zero") {
    for (size_t j = 0; j < a.coeffs.size(); j += 2)
      CHECK(a.coeffs[j] == 0.0);
  }
}

TEST_CASE("a different seed may search differently but stays reproducible") {
  double tau = 1.5 * p150.tau_ho();
  double dt = p150.tau_ho() / 512;
  OptimResult a = optimize(tau, kSite, p150, std::nullopt, lims,
                           quick(90, 1), g16, dt);
  OptimResult b = optimize(tau, kSite, p150, std::nullopt, lims,
                           quick(90, 1), g16, dt);
  CHECK(a.fidelity == b.fidelity);
}

TEST_CASE("tiny budgets exhaust and still return the best seen") {
  double tau = 1.5 * p150.tau_ho();
  OptimResult r = optimize(tau, kSite, p150, std::nullopt, lims, quick(12),
                           g16, p150.tau_ho() / 512);
  CHECK(r.budget_exhausted);
  CHECK(r.fidelity > 0.5);
  CHECK(r.evals <= 12 + 1);
}

TEST_CASE("config validation") {
  double tau = 1.5 * p150.tau_ho();
  double dt = p150.tau_ho() / 512;
  OptimizerConfig bad = quick(100);
  bad.j_max = 1;
  CHECK_THROWS_AS(
      optimize(tau, kSite, p150, std::nullopt, lims, bad, g16, dt),
      ConfigError);
  OptimizerConfig tiny = quick(4);
  CHECK_THROWS_AS(
      optimize(tau, kSite, p150, std::nullopt, lims, tiny, g16, dt),
      ConfigError);
  CHECK_THROWS_AS(
      optimize(-1.0, kSite, p150, std::nullopt, lims, quick(100), g16, dt),
      ConfigError);
}

TEST_CASE("warm-start chains demand strictly decreasing durations") {
  double tho = p150.tau_ho();
  CHECK_THROWS_AS(
      warm_start_chain({1.0 * tho, 1.2 * tho}, kSite, p150, std::nullopt, lims,
                       quick(60), g16, tho / 512),
      ConfigError);
  auto chain = warm_start_chain({2.0 * tho, 1.5 * tho}, kSite, p150,
                                std::nullopt, lims, quick(60), g16, tho / 512);
  REQUIRE(chain.size() == 2);
  CHECK(chain[0].fidelity > 0.99);
  CHECK(chain[1].fidelity > 0.95);
}

TEST_CASE("speed-limit scan bookkeeping on a coarse grid") {
  QslScan scan = scan_qsl({150.0}, {1.3, 1.1}, 0.5, kSite, std::nullopt, lims,
                          quick(250), 16, 2);
  REQUIRE(scan.rows.size() == 1);
  const QslRow& row = scan.rows[0];
  REQUIRE(row.fidelity.size() == 2);
  CHECK(row.tau_over_tau_ho[0] == doctest::Approx(1.3));
  CHECK(row.fidelity[0] >= row.fidelity[1] - 0.02);
  CHECK(row.controlled_levels == 6);
  CHECK(row.bound_levels == 8);
  // no collapse this far above the bound
  CHECK_FALSE(row.crossed);
}
