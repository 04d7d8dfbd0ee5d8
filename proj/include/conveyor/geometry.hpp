#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "conveyor/grid.hpp"
#include "conveyor/propagator.hpp"
#include "conveyor/trajectory.hpp"

namespace conveyor {

// f(xi) = sqrt(1 + xi^2) + xi^2 * arccsch(xi); f(0) = 1, monotone increasing.
double f_factor(double xi);

// Geodesic length of the displaced-ground-state manifold: d * sigma_p = d/(2 sigma_x).
double l_qgt(double d, const LatticeParams& p);

// Same length from the numeric ground state: accumulate arccos|<psi_0(x+h)|psi_0(x)>|
// along the displacement, evaluated in momentum space.
double l_qgt_grid(double d, const LatticeParams& p, const Grid& g);

// Path-length estimate for a duration-tau transport: l_qgt * f(tau_ho/(pi tau)).
double l_qb_estimate(double d, double tau, const LatticeParams& p);

// Upper bound on the time-averaged energy spread: (1/tau) * l_qgt * f(tau/(2 n tau_ho)).
double delta_e_upper(double d, double tau, const LatticeParams& p);

// hbar * arccos|<target|init>| / delta_e.
double mandelstam_tamm_time(const WaveFunction& init, const WaveFunction& target,
                            double delta_e);

// Fubini-Study length of a sampled evolution: sum of arccos|<psi_k+1|psi_k>|.
// Adjacent overlaps below 0.99 raise ResolutionError.
double path_length(const std::vector<WaveFunction>& states);

// Trapezoidal time average of the instantaneous energy spread over the log.
double average_energy_spread(const std::vector<WaveFunction>& states,
                             const std::vector<double>& times,
                             const Potential1D& pot);

// Coherent-state model of the time-optimal transport: piecewise-quadratic
// packet path, phase-space curve alpha(t), Fubini-Study length by quadrature
// and in closed form.
struct CoherentModel {
  std::vector<double> t;
  std::vector<double> re_alpha, im_alpha;
  double length_quadrature = 0.0;
  double length_closed_form = 0.0;
  double mid_velocity = 0.0;  // packet speed at tau/2
};
CoherentModel coherent_model(double d, double tau, const LatticeParams& p);

struct GeometryReport {
  double ell = 0.0;            // measured path length
  double delta_e = 0.0;        // time-averaged energy spread
  double ell_geo = 0.0;        // arccos|<psi_target|psi_init>|
  double ell_qgt = 0.0;
  double ell_qb_est = 0.0;
  double delta_e_upper = 0.0;
  double tau_mt = 0.0;
  double aa_residual = 0.0;    // |ell - delta_e * tau| / ell
  bool tau_above_cb = false;   // duration respects the classical bound
  bool ell_above_qgt = false;
  double ell_over_geo = 0.0;
  double tau = 0.0, d = 0.0, u0 = 0.0;

  nlohmann::json to_json() const;
};

// Full report for a logged run. init/target are the states the transport
// fidelity is measured against (ground states at start/end positions).
GeometryReport bound_report(const std::vector<WaveFunction>& states,
                            const std::vector<double>& times,
                            const Potential1D& pot, const Trajectory& traj,
                            const LatticeParams& p, const WaveFunction& init,
                            const WaveFunction& target);

// Propagate with state logging sized for geometry (auto-refines the sampling
// until adjacent overlaps exceed 0.99), and return final state + log.
struct GeometryRun {
  WaveFunction final_state;
  std::vector<WaveFunction> states;
  std::vector<double> times;
};
GeometryRun propagate_logged(const WaveFunction& psi0, const Potential1D& pot,
                             double t0, double t1, double dt,
                             int sample_every = 4);

}  // namespace conveyor
