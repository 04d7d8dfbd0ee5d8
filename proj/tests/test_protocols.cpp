#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "conveyor/errors.hpp"
#include "conveyor/lattice.hpp"
#include "conveyor/trajectory.hpp"
#include "doctest.h"

using namespace conveyor;

namespace {
const LatticeParams p150(150.0);
const LatticeParams anchored(150.0, 2000.0, 865.9);

// classical particle in the full sinusoidal well, m = 1/2:
// x'' = -2 u0 sin(2 (x - x_c(t)))
struct ClassicalRk4 {
  const Trajectory& traj;
  double u0;
  double x = 0.0, v = 0.0;

  void accel(double t, double xx, double* a) const {
    *a = -2.0 * u0 * std::sin(2.0 * (xx - traj.position(t)));
  }
  void run(double t1, int steps) {
    double h = t1 / steps;
    for (int i = 0; i < steps; ++i) {
      double t = i * h;
      double a1, a2, a3, a4;
      accel(t, x, &a1);
      accel(t + h / 2, x + v * h / 2, &a2);
      accel(t + h / 2, x + v * h / 2 + a1 * h * h / 4, &a3);
      accel(t + h, x + v * h + a2 * h * h / 2, &a4);
      double k1v = a1, k2v = a2, k3v = a3, k4v = a4;
      double k1x = v, k2x = v + a1 * h / 2, k3x = v + a2 * h / 2,
             k4x = v + a3 * h;
      x += h * (k1x + 2 * k2x + 2 * k3x + k4x) / 6;
      v += h * (k1v + 2 * k2v + 2 * k3v + k4v) / 6;
    }
  }
};
}

TEST_CASE("endpoint values for the smooth protocols") {
  double tau = 0.4;
  for (auto make : {&Trajectory::linear, &Trajectory::parabolic,
                    &Trajectory::adiabatic_sine}) {
    Trajectory t = make(kSite, tau);
    CHECK(t.position(-1.0) == doctest::Approx(0.0));
    CHECK(t.position(0.0) == doctest::Approx(0.0));
    CHECK(t.position(tau) == doctest::Approx(kSite).epsilon(1e-12));
    CHECK(t.position(tau + 1.0) == doctest::Approx(kSite));
    // midpoint symmetry
    CHECK(t.position(0.3 * tau) + t.position(0.7 * tau) ==
          doctest::Approx(kSite).epsilon(1e-12));
  }
}

TEST_CASE("peak velocities of the closed forms") {
  double d = kSite, tau = 0.4;
  CHECK(Trajectory::linear(d, tau).velocity(0.2 * tau) ==
        doctest::Approx(d / tau));
  CHECK(Trajectory::parabolic(d, tau).velocity(tau / 2) ==
        doctest::Approx(2.0 * d / tau));
  CHECK(Trajectory::adiabatic_sine(d, tau).velocity(tau / 2) ==
        doctest::Approx(2.0 * d / tau));
  CHECK(Trajectory::adiabatic_sine(d, tau).velocity(1e-9) ==
        doctest::Approx(0.0).epsilon(1e-6));
  std::vector<double> b{0.0};
  CHECK(Trajectory::fourier(d, tau, b).velocity(tau / 2) ==
        doctest::Approx(M_PI * d / (2.0 * tau)));
}

TEST_CASE("classical speed-limit duration") {
  CHECK(tau_cb(kSite, p150) ==
        doctest::Approx(0.797884560803 * p150.tau_ho()).epsilon(1e-10));
  CHECK(tau_cb(2 * kSite, p150) ==
        doctest::Approx(std::sqrt(2.0) * tau_cb(kSite, p150)).epsilon(1e-12));
}

TEST_CASE("jump ansatz geometry") {
  double tau = p150.tau_ho();
  Trajectory t = Trajectory::classical_ansatz(kSite, tau, p150);
  double tcb = tau_cb(kSite, p150);
  CHECK(t.jump() ==
        doctest::Approx(0.5 * std::asin(std::pow(tcb / tau, 2.0))).epsilon(1e-12));
  // interior: carrier + jump at the start, mirrored at the end
  CHECK(t.position(1e-12) == doctest::Approx(t.jump()).epsilon(1e-6));
  CHECK(t.position(tau - 1e-12) ==
        doctest::Approx(kSite - t.jump()).epsilon(1e-6));

  SUBCASE("at the bound the jump reaches an eighth period") {
    Trajectory tb = Trajectory::classical_ansatz(kSite, tcb * 1.0000001, p150);
    CHECK(tb.jump() == doctest::Approx(M_PI / 4).epsilon(1e-3));
  }
  SUBCASE("below the bound: infeasible") {
    CHECK_THROWS_AS(Trajectory::classical_ansatz(kSite, 0.99 * tcb, p150),
                    InfeasibleError);
  }
}

TEST_CASE("jump ansatz moves a classical particle exactly one site") {
  for (double rel : {0.85, 1.0, 1.3}) {
    double tau = rel * p150.tau_ho();
    Trajectory t = Trajectory::classical_ansatz(kSite, tau, p150);
    ClassicalRk4 sim{t, p150.u0};
    sim.run(tau, 40000);
    CHECK(sim.x == doctest::Approx(kSite).epsilon(1e-5));
    CHECK(std::fabs(sim.v) < 1e-3 * kSite / tau);
  }
}

TEST_CASE("worst-case envelope durations at l_qgt = 11, F = 1/e") {
  double F = std::exp(-1.0);
  double tho = p150.tau_ho();
  CHECK(envelope_duration(EnvelopeProtocol::linear, F, 11.0, p150) / tho ==
        doctest::Approx(3.50141).epsilon(1e-4));
  CHECK(envelope_duration(EnvelopeProtocol::parabolic, F, 11.0, p150) / tho ==
        doctest::Approx(2.0 * std::sqrt(11.0) / kSite).epsilon(1e-6));
  CHECK(envelope_duration(EnvelopeProtocol::adiabatic, F, 11.0, p150) / tho ==
        doctest::Approx(1.72407).epsilon(1e-4));

  SUBCASE("ranking flips for short geodesics") {
    double tl = envelope_duration(EnvelopeProtocol::linear, F, 3.0, p150);
    double ta = envelope_duration(EnvelopeProtocol::adiabatic, F, 3.0, p150);
    CHECK(tl < ta);
  }
  SUBCASE("F outside (0,1) rejected") {
    CHECK_THROWS_AS(envelope_duration(EnvelopeProtocol::linear, 0.0, 11.0, p150),
                    std::domain_error);
    CHECK_THROWS_AS(envelope_duration(EnvelopeProtocol::linear, 1.0, 11.0, p150),
                    std::domain_error);
  }
}

TEST_CASE("fourier projection") {
  double tau = 1.2 * p150.tau_ho();
  SUBCASE("recovers exact coefficients") {
    std::vector<double> b{0.0, 0.11, 0.0, -0.04};
    Trajectory t = Trajectory::fourier(kSite, tau, b);
    std::vector<double> got = project_to_fourier(t, 6);
    REQUIRE(got.size() == 6);
    for (size_t j = 0; j < b.size(); ++j)
      CHECK(got[j] == doctest::Approx(b[j]).epsilon(1e-9));
    CHECK(got[4] == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("reconstruction error shrinks as the basis grows") {
    Trajectory t = Trajectory::classical_ansatz(kSite, tau, p150);
    double prev = 1e9;
    for (int jm : {2, 4, 8, 16}) {
      double err = 0.0;
      project_to_fourier(t, jm, &err);
      CHECK(err < prev);
      prev = err;
    }
  }
  SUBCASE("ansatz projection is midpoint-antisymmetric: even terms only") {
    Trajectory t = Trajectory::classical_ansatz(kSite, tau, p150);
    std::vector<double> b = project_to_fourier(t, 8);
    for (size_t j = 0; j < b.size(); j += 2)  // odd indices j+1
      CHECK(std::fabs(b[j]) < 1e-9);
    CHECK(std::fabs(b[1]) > 1e-3);
  }
}

TEST_CASE("feasibility report under the actuator limits") {
  FeasibilityLimits lim;
  SUBCASE("one site per trap period passes comfortably") {
    Trajectory t = Trajectory::linear(kSite, anchored.tau_ho());
    FeasibilityReport r = feasibility_check(t, lim, anchored);
    double v = kSite / anchored.tau_ho();
    CHECK(r.max_slew_rad_per_us ==
          doctest::Approx(2.0 * v / anchored.time_unit_us()).epsilon(1e-6));
    CHECK(r.max_slew_rad_per_us == doctest::Approx(0.30783).epsilon(1e-4));
    CHECK(r.pass());
  }
  SUBCASE("glacial motion is trivially feasible") {
    Trajectory t = Trajectory::linear(kSite, 1000.0 * anchored.tau_ho());
    FeasibilityReport r = feasibility_check(t, lim, anchored);
    CHECK(r.max_slew_rad_per_us < 1e-3);
    CHECK(r.pass());
  }
  SUBCASE("a fast ramp violates the slew bound") {
    Trajectory t = Trajectory::linear(kSite, 0.25 * anchored.tau_ho());
    FeasibilityReport r = feasibility_check(t, lim, anchored);
    CHECK_FALSE(r.slew_ok);
  }
  SUBCASE("high harmonics violate the bandwidth bound") {
    std::vector<double> b(24, 0.0);
    b[23] = 0.05;
    Trajectory t = Trajectory::fourier(kSite, 0.02 * anchored.tau_ho(), b);
    FeasibilityReport r = feasibility_check(t, lim, anchored);
    CHECK_FALSE(r.bandwidth_ok);
  }
  SUBCASE("SI limits need the SI anchor") {
    Trajectory t = Trajectory::linear(kSite, p150.tau_ho());
    CHECK_THROWS_AS(feasibility_check(t, lim, p150), ConfigError);
  }
}

TEST_CASE("automatic fourier order") {
  FeasibilityLimits lim;
  bool warn = true;
  int j = default_j_max(anchored.tau_ho(), lim, anchored, &warn);
  CHECK(j == 24);  // bandwidth allows 32, desk cap keeps 24
  CHECK_FALSE(warn);
  CHECK(default_j_max(0.05 * anchored.tau_ho(), lim, anchored) == 2);

  // a depth demanding more bandwidth than the cap provides trips the warning
  LatticeParams deep(3000.0, 2000.0, 865.9);
  default_j_max(deep.tau_ho(), lim, deep, &warn);
  CHECK(warn);
}

TEST_CASE("trajectory serialization round trip") {
  double tau = 0.31;
  std::vector<Trajectory> cases;
  cases.push_back(Trajectory::linear(kSite, tau));
  cases.push_back(Trajectory::fourier(kSite, tau, {0.0, 0.07, 0.0, -0.01}));
  cases.push_back(Trajectory::sampled(kSite, tau, {0.0, 0.1, 0.2, 0.31},
                                      {0.0, 0.3, 2.2, kSite}));
  for (const auto& t : cases) {
    Trajectory back = Trajectory::from_json(t.to_json());
    CHECK(back.kind() == t.kind());
    CHECK(back.d() == doctest::Approx(t.d()));
    CHECK(back.tau() == doctest::Approx(t.tau()));
    for (double s : {0.05, 0.15, 0.28})
      CHECK(back.position(s) == doctest::Approx(t.position(s)).epsilon(1e-12));
  }
}

TEST_CASE("sampled trajectories validate their tables") {
  CHECK_THROWS_AS(
      Trajectory::sampled(kSite, 0.3, {0.0, 0.2, 0.1}, {0.0, 1.0, 2.0}),
      ConfigError);
}
