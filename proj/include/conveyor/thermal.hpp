#pragma once

#include <vector>

#include "conveyor/grid.hpp"
#include "conveyor/lattice.hpp"
#include "conveyor/trajectory.hpp"
#include "conveyor/transport.hpp"

namespace conveyor {

struct ThermalConfig {
  double t_perp_uk = 1.0;         // transverse temperature, microkelvin
  double omega_perp_hz = 1000.0;  // transverse trap frequency nu, Hz
  double waist_um = 20.0;         // lattice beam waist
  int n_radii = 10;
};

// Radial quadrature for the 2-D thermal distribution P(r) dr =
// (r/r0^2) exp(-r^2/(2 r0^2)) dr. Nodes span [0, r_max] with r_max where P
// falls to 1e-6 of its mode; trapezoidal weights, normalized to sum 1.
// depth_scale carries the beam-profile factor exp(-2 r^2 / w^2).
struct RadialRule {
  std::vector<double> radius_um;
  std::vector<double> weight;
  std::vector<double> depth_scale;
  double r0_um = 0.0;
};

RadialRule radial_rule(const ThermalConfig& th, const LatticeParams& p,
                       int n_radii_override = 0);

// Thermal RMS radius r0 = sqrt(kB T / (m omega_perp^2)) in micrometers.
double thermal_radius_um(const ThermalConfig& th, const LatticeParams& p);

// Cached per-radius transport contexts for repeated thermal evaluations.
class ThermalSet {
 public:
  ThermalSet(const LatticeParams& p, const ThermalConfig& th, const Grid& g,
             double d, double dt, int n_radii_override = 0);
  TransportResult run(const Trajectory& traj, bool with_detection = true) const;
  const RadialRule& rule() const { return rule_; }

 private:
  RadialRule rule_;
  std::vector<TransportContext> ctxs_;
};

// One-shot Boltzmann-weighted average over radii; the depth seen at radius r
// is u0 * depth_scale(r).
TransportResult thermal_fidelity(const Trajectory& traj, const LatticeParams& p,
                                 const ThermalConfig& th, const Grid& g,
                                 double dt, int n_radii_override = 0);

}  // namespace conveyor
