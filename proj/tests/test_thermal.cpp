#include <cmath>

#include "conveyor/detection.hpp"
#include "conveyor/grid.hpp"
#include "conveyor/lattice.hpp"
#include "conveyor/propagator.hpp"
#include "conveyor/thermal.hpp"
#include "conveyor/trajectory.hpp"
#include "conveyor/transport.hpp"
#include "doctest.h"

using namespace conveyor;

namespace {
const LatticeParams p150(150.0, 2000.0, 865.9);
const Grid g16 = make_grid(16, 64);
ThermalConfig micro_kelvin() {
  ThermalConfig th;
  th.t_perp_uk = 1.0;
  return th;
}
}

TEST_CASE("thermal cloud radius from the SI anchors") {
  // r0 = sqrt(kB T / (m omega^2)), cesium-scale mass, 1 kHz transverse trap
  double r0 = thermal_radius_um(micro_kelvin(), p150);
  CHECK(r0 == doctest::Approx(1.258).epsilon(2e-3));
  // scales as sqrt(T)
  ThermalConfig hot = micro_kelvin();
  hot.t_perp_uk = 4.0;
  CHECK(thermal_radius_um(hot, p150) == doctest::Approx(2.0 * r0).epsilon(1e-9));
}

TEST_CASE("radial quadrature rule") {
  RadialRule rule = radial_rule(micro_kelvin(), p150);
  REQUIRE(rule.radius_um.size() == 10);
  REQUIRE(rule.weight.size() == 10);

  SUBCASE("weights normalized") {
    double sum = 0.0;
    for (double w : rule.weight) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("cutoff sits where the density has fallen to 1e-6") {
    double xi_max = rule.radius_um.back() / rule.r0_um;
    CHECK(xi_max > 5.2);
    CHECK(xi_max < 6.2);
  }
  SUBCASE("second moment of the Rayleigh distribution") {
    // E[xi^2] = 2 for P(xi) = xi exp(-xi^2/2)
    RadialRule fine = radial_rule(micro_kelvin(), p150, 400);
    double m2 = 0.0;
    for (size_t i = 0; i < fine.weight.size(); ++i) {
      double xi = fine.radius_um[i] / fine.r0_um;
      m2 += fine.weight[i] * xi * xi;
    }
    CHECK(m2 == doctest::Approx(2.0).epsilon(1e-3));
    // the 10-node default is within a few percent of the fine rule
    double m2c = 0.0;
    for (size_t i = 0; i < rule.weight.size(); ++i) {
      double xi = rule.radius_um[i] / rule.r0_um;
      m2c += rule.weight[i] * xi * xi;
    }
    CHECK(m2c == doctest::Approx(2.0).epsilon(0.05));
  }
  SUBCASE("beam profile reduces the depth off axis") {
    ThermalConfig th = micro_kelvin();
    for (size_t i = 0; i < rule.radius_um.size(); ++i) {
      double expected =
          std::exp(-2.0 * std::pow(rule.radius_um[i] / th.waist_um, 2.0));
      CHECK(rule.depth_scale[i] == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(rule.depth_scale.front() == doctest::Approx(1.0));
    CHECK(rule.depth_scale.back() < 1.0);
  }
}

TEST_CASE("zero-temperature limit recovers the pure result") {
  ThermalConfig cold = micro_kelvin();
  cold.t_perp_uk = 1e-8;
  double tau = 1.5 * p150.tau_ho();
  Trajectory traj = Trajectory::linear(kSite, tau);
  double dt = p150.tau_ho() / 512;
  TransportResult pure = transport_fidelity(traj, p150, g16, dt);
  TransportResult th = thermal_fidelity(traj, p150, cold, g16, dt, 4);
  CHECK(th.fidelity == doctest::Approx(pure.fidelity).epsilon(1e-6));
}

TEST_CASE("finite temperature degrades a revival-peak transport") {
  // first fidelity-revival peak; anharmonic dephasing caps it below unity
  double tau = 1.057 * p150.tau_revival();
  Trajectory traj = Trajectory::linear(kSite, tau);
  double dt = p150.tau_ho() / 512;
  TransportResult pure = transport_fidelity(traj, p150, g16, dt);
  TransportResult th = thermal_fidelity(traj, p150, micro_kelvin(), g16, dt);
  CHECK(pure.fidelity > 0.85);
  CHECK(th.fidelity < pure.fidelity);
}

TEST_CASE("cached thermal set agrees with the one-shot average") {
  double tau = 1.2 * p150.tau_ho();
  double dt = p150.tau_ho() / 512;
  Trajectory traj = Trajectory::linear(kSite, tau);
  ThermalSet set(p150, micro_kelvin(), g16, kSite, dt, 6);
  TransportResult a = set.run(traj, false);
  TransportResult b = thermal_fidelity(traj, p150, micro_kelvin(), g16, dt, 6);
  CHECK(a.fidelity == doctest::Approx(b.fidelity).epsilon(1e-13));
}

TEST_CASE("ground-band population as the detection model") {
  WaveFunction gs = lattice_ground_state(g16, LatticeParams(150.0),
                                         g16.home_site());
  SUBCASE("a parked ground state is fully detected") {
    CHECK(ground_band_population(gs, LatticeParams(150.0), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("site label does not matter to the detector") {
    CHECK(ground_band_population(gs.shifted_sites(3), LatticeParams(150.0), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("a hot packet is only partially detected") {
    WaveFunction hot = gaussian_packet(g16, g16.site_center(8), 0.45, 3.0);
    double pop = ground_band_population(hot, LatticeParams(150.0), 0.0);
    CHECK(pop < 0.9);
    CHECK(pop > 0.0);
  }
  SUBCASE("detection never falls below the site-resolved fidelity") {
    double tau = 0.9 * LatticeParams(150.0).tau_ho();
    Trajectory traj = Trajectory::linear(kSite, tau);
    TransportResult r = transport_fidelity(traj, LatticeParams(150.0), g16,
                                           LatticeParams(150.0).tau_ho() / 512);
    CHECK(r.detection_fidelity >= r.fidelity - 1e-9);
  }
}
