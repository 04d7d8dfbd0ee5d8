#include <cmath>

#include "conveyor/grid.hpp"
#include "conveyor/interferometer.hpp"
#include "conveyor/lattice.hpp"
#include "conveyor/optimizer.hpp"
#include "conveyor/trajectory.hpp"
#include "doctest.h"

using namespace conveyor;

namespace {
const LatticeParams p150(150.0, 2000.0, 865.9);
const Grid g16 = make_grid(16, 64);
}

TEST_CASE("balanced beam pair reproduces the primary depth when aligned") {
  for (double ratio : {1.0, 7.0}) {
    SpinDownField f = balanced_field(150.0, ratio);
    CHECK(f.i_l == doctest::Approx(ratio * f.i_r));
    SpinDownShape s = down_shape(f);
    CHECK(s.depth == doctest::Approx(150.0).epsilon(1e-12));
    CHECK(s.center == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("stationary-arm contrast") {
  double tho = p150.tau_ho();
  double dt = tho / 512;
  SpinDownField field = balanced_field(150.0, 7.0);

  SUBCASE("slow transport keeps both arms coherent") {
    Trajectory traj = Trajectory::adiabatic_sine(kSite, 4.0 * tho);
    InterferometerResult r =
        interferometer_contrast(traj, p150, field, true, g16, dt);
    CHECK(r.contrast > 0.95);
    CHECK(r.f2 > 0.9);
    CHECK(r.contrast <= 1.0 + 1e-9);
  }

  SUBCASE("without compensation the stationary arm is dragged and heated") {
    // equal intensities: the r arm carries 1/8 of the beat phasor, enough
    // drag to matter once the conveyor sweeps a full period
    SpinDownField even = balanced_field(150.0, 1.0);
    Trajectory traj = Trajectory::parabolic(kSite, 1.2 * tho);
    InterferometerResult on =
        interferometer_contrast(traj, p150, even, true, g16, dt);
    InterferometerResult off =
        interferometer_contrast(traj, p150, even, false, g16, dt);
    CHECK(off.contrast < on.contrast);
  }

  SUBCASE("contrast tracks the one-way fidelity for an optimized ramp") {
    OptimizerConfig oc;
    oc.max_evals = 160;
    oc.seed = 7;
    OptimResult opt = optimize(1.5 * tho, kSite, p150, std::nullopt,
                               FeasibilityLimits{}, oc, g16, dt);
    InterferometerResult r = interferometer_contrast(opt.trajectory(), p150,
                                                     field, true, g16, dt);
    CHECK(std::fabs(r.contrast - opt.fidelity) < 0.05);
  }
}
