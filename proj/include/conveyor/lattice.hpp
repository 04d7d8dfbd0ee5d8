#pragma once

#include <optional>
#include <string>

namespace conveyor {

// Recoil units throughout: hbar = 1, recoil energy E_r = 1, length unit 1/k
// (k = 2*pi/lambda), so lambda = 2*pi and one lattice site is pi. The atomic
// mass is 1/2 in these units and the Hamiltonian reads H = p^2 + V(x).
// One time unit is hbar/E_r = 1/(2*pi*e_rec_hz) seconds.

inline constexpr double kBoltzmann = 1.380649e-23;      // J/K
inline constexpr double kHbar = 1.054571817e-34;        // J*s
inline constexpr double kSite = 3.14159265358979323846; // one lattice period, 1/k units

struct LatticeParams {
  double u0;  // trap depth, recoil energies; V(x) = -u0 cos^2(x - x_trap)

  // Optional SI anchors. e_rec_hz is the recoil frequency E_r/(2*pi*hbar).
  std::optional<double> e_rec_hz;
  std::optional<double> lambda_nm;

  explicit LatticeParams(double depth,
                         std::optional<double> erec_hz = std::nullopt,
                         std::optional<double> lam_nm = std::nullopt);

  double omega_ho() const;      // trap frequency at the well bottom, 2*sqrt(u0)
  double tau_ho() const;        // oscillation period 2*pi/omega_ho = pi/sqrt(u0)
  double tau_revival() const;   // anharmonicity-shifted revival period
  double sigma_x() const;       // harmonic ground-state width, 1/k units
  double sigma_p() const;       // conjugate momentum width, hbar*k units

  // SI conversions; throw ConfigError when the needed anchor is absent.
  double seconds(double t) const;
  double time_unit_us() const;        // microseconds per recoil time unit
  double meters(double x) const;
  double mass_kg() const;             // pi*hbar/(lambda^2 * e_rec_hz)
  double harmonic_period_si(double* out_seconds) const;  // tau_ho in both units
};

// Conveyor potential for the transported spin state:
// V(x) = -u0 cos^2(x - x_trap), minima at x_trap + n*pi.
double potential_up(double x, double x_trap, const LatticeParams& p);

// Beam pair forming the secondary (untransported) lattice. Intensities are in
// trap-depth units of the same scale as u0; phases in radians. The l arm
// couples with 7x weight, the r arm with 1x.
struct SpinDownField {
  double i_l = 0.0;
  double i_r = 0.0;
  double phi_l = 0.0;
  double phi_r = 0.0;
};

struct SpinDownShape {
  double depth;   // modulation depth of the cos^2 term
  double offset;  // additive energy offset
  double center;  // trap position, 1/k units
};

SpinDownShape down_shape(const SpinDownField& f);

// V_down(x) = -offset - depth*cos^2(x - center)
double potential_down(double x, const SpinDownField& f);

// Solve for phi_l such that the secondary trap sits at x_target, holding
// phi_r and both intensities fixed. Root finding on the wrapped beat angle,
// taking the branch nearest phi_l_guess. Throws InfeasibleError when x_target
// lies outside the reachable cone (possible only for i_r > 7*i_l); the message
// reports the nearest achievable position.
double compensation_phase(const SpinDownField& f, double x_target,
                          double phi_l_guess);

// Trap phase advance per unit trap displacement: phi = 2*x in recoil units.
inline constexpr double kPhasePerPosition = 2.0;

}  // namespace conveyor
