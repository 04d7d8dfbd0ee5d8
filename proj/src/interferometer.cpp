#include "conveyor/interferometer.hpp"

#include <cmath>

#include "conveyor/errors.hpp"
#include "conveyor/potentials.hpp"
#include "conveyor/propagator.hpp"

namespace conveyor {

SpinDownField balanced_field(double u0, double intensity_ratio) {
  if (!(intensity_ratio > 0.0))
    throw ConfigError("intensity_ratio must be positive");
  SpinDownField f;
  f.i_r = 8.0 * u0 / (7.0 * intensity_ratio + 1.0);
  f.i_l = intensity_ratio * f.i_r;
  return f;
}

InterferometerResult interferometer_contrast(const Trajectory& traj,
                                             const LatticeParams& p,
                                             const SpinDownField& field,
                                             bool compensate, const Grid& g,
                                             double dt) {
  double x0 = g.site_center(g.home_site());
  double t_total = 2.0 * traj.tau();
  PositionFn path = traj.round_trip_fn();

  LatticePotential pot_up(p, path, x0);
  WaveFunction up0 = ground_state(g, p, pot_up, g.home_site());
  WaveFunction up = propagate(up0, pot_up, 0.0, t_total, dt);

  SpinDownPotential pot_dn(field, path, t_total, compensate, x0);
  WaveFunction dn0 = ground_state(g, p, pot_dn, g.home_site());
  WaveFunction dn = propagate(dn0, pot_dn, 0.0, t_total, dt);

  InterferometerResult r;
  r.contrast = std::abs(overlap(dn, up));
  r.f2 = fidelity(up, up0);
  r.sqrt_f2 = std::sqrt(r.f2);
  return r;
}

}  // namespace conveyor
