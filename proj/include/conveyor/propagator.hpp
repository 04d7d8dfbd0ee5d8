#pragma once

#include <optional>
#include <vector>

#include "conveyor/grid.hpp"
#include "conveyor/potentials.hpp"

namespace conveyor {

// Optional state log filled during propagation; used by the geometry pass.
struct StateLog {
  int sample_every = 4;  // record every k-th step (plus first and last)
  std::vector<double> times;
  std::vector<WaveFunction> states;
};

struct PropagateOptions {
  StateLog* log = nullptr;
  bool check_momentum_tail = false;  // sets tail_warning on the result
};

struct PropagateInfo {
  double final_norm_drift = 0.0;  // |norm - 1| after the run
  bool tail_warning = false;     // momentum support approached the grid cutoff
};

// Strang split-step evolution of psi under H = p^2 + V(x,t) from t0 to t1.
// Potential kicks use the step-midpoint time; global error O(dt^2); the
// actual step is t_span/ceil(t_span/dt) so the interval divides evenly.
WaveFunction propagate(WaveFunction psi, const Potential1D& pot, double t0,
                       double t1, double dt, const PropagateOptions& opt = {},
                       PropagateInfo* info = nullptr);

// Lowest state of the potential frozen at time t_freeze, localized at the
// given site: imaginary-time split-step from a Gaussian seed, renormalized
// every step, converged when the energy moves < 1e-12 per step.
WaveFunction ground_state(const Grid& g, const LatticeParams& p,
                          const Potential1D& pot, int site,
                          double t_freeze = 0.0);

// Convenience: ground state of the plain conveyor lattice with the trap at
// site_center(site) + offset.
WaveFunction lattice_ground_state(const Grid& g, const LatticeParams& p,
                                  int site, double offset = 0.0);

// <H>, and the spread sqrt(<H^2> - <H>^2), via spectral application of H.
double mean_energy(const WaveFunction& psi, const Potential1D& pot, double t);
double energy_spread(const WaveFunction& psi, const Potential1D& pot, double t);

// Spread of the kinetic and potential parts separately.
double kinetic_spread(const WaveFunction& psi);
double potential_spread(const WaveFunction& psi, const Potential1D& pot, double t);

// Default time step for a given depth.
double default_dt(const LatticeParams& p);

}  // namespace conveyor
