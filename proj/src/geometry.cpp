#include "conveyor/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "conveyor/errors.hpp"
#include "conveyor/fft.hpp"

namespace conveyor {

double f_factor(double xi) {
  if (xi < 0.0) throw InfeasibleError("f_factor needs xi >= 0");
  if (xi < 1e-12) return 1.0;
  double inv = 1.0 / xi;
  double arccsch = std::log(inv + std::sqrt(1.0 + inv * inv));
  return std::sqrt(1.0 + xi * xi) + xi * xi * arccsch;
}

double l_qgt(double d, const LatticeParams& p) {
  if (!(d > 0.0)) throw InfeasibleError("l_qgt needs d > 0");
  return d * p.sigma_p();
}

double l_qgt_grid(double d, const LatticeParams& p, const Grid& g) {
  WaveFunction gs = lattice_ground_state(g, p, g.home_site());
  int n = g.size();
  Fft fft(n);
  std::vector<std::complex<double>> spec(gs.data(), gs.data() + n);
  fft.forward(spec.data());
  std::vector<double> prob(static_cast<size_t>(n));
  double tot = 0.0;
  for (int i = 0; i < n; ++i) {
    prob[static_cast<size_t>(i)] = std::norm(spec[static_cast<size_t>(i)]);
    tot += prob[static_cast<size_t>(i)];
  }
  // |<psi(x+h)|psi(x)>| = |sum_p prob_p e^{-i p h}| / sum_p prob_p: the
  // displaced ground state is the same state translated, so one momentum
  // distribution serves the whole path.
  const int steps = 512;
  double h = d / steps;
  std::complex<double> chi = 0.0;
  for (int i = 0; i < n; ++i)
    chi += prob[static_cast<size_t>(i)] *
           std::polar(1.0, -g.momentum(i) * h);
  double inc = std::acos(std::min(1.0, std::abs(chi) / tot));
  return steps * inc;
}

double l_qb_estimate(double d, double tau, const LatticeParams& p) {
  if (!(tau > 0.0)) throw InfeasibleError("l_qb_estimate needs tau > 0");
  return l_qgt(d, p) * f_factor(p.tau_ho() / (kSite * tau));
}

double delta_e_upper(double d, double tau, const LatticeParams& p) {
  if (!(tau > 0.0)) throw InfeasibleError("delta_e_upper needs tau > 0");
  double n = d / kSite;
  return (1.0 / tau) * l_qgt(d, p) * f_factor(tau / (2.0 * n * p.tau_ho()));
}

double mandelstam_tamm_time(const WaveFunction& init, const WaveFunction& target,
                            double delta_e) {
  double ov = std::min(1.0, std::abs(overlap(target, init)));
  double lg = std::acos(ov);
  if (delta_e <= 0.0)
    return lg == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return lg / delta_e;
}

double path_length(const std::vector<WaveFunction>& states) {
  if (states.size() < 2)
    throw ConfigError("path_length needs at least 2 states");
  double ell = 0.0;
  for (size_t k = 0; k + 1 < states.size(); ++k) {
    double ov = std::min(1.0, std::abs(overlap(states[k + 1], states[k])));
    if (ov < 0.99) {
      throw ResolutionError("state sampling too coarse for path length "
                            "(adjacent overlap " + std::to_string(ov) + ")");
    }
    ell += std::acos(ov);
  }
  return ell;
}

double average_energy_spread(const std::vector<WaveFunction>& states,
                             const std::vector<double>& times,
                             const Potential1D& pot) {
  if (states.size() != times.size() || states.size() < 2)
    throw ConfigError("energy spread log mismatch");
  double acc = 0.0;
  double prev = energy_spread(states[0], pot, times[0]);
  for (size_t k = 1; k < states.size(); ++k) {
    double cur = energy_spread(states[k], pot, times[k]);
    acc += 0.5 * (prev + cur) * (times[k] - times[k - 1]);
    prev = cur;
  }
  return acc / (times.back() - times.front());
}

CoherentModel coherent_model(double d, double tau, const LatticeParams& p) {
  if (!(tau > 0.0)) throw InfeasibleError("coherent model needs tau > 0");
  CoherentModel m;
  const int n = 8192;
  double sx = p.sigma_x();
  double sp = p.sigma_p();
  double mass = 0.5;
  m.t.resize(n + 1);
  m.re_alpha.resize(n + 1);
  m.im_alpha.resize(n + 1);
  auto xbar = [&](double t) {
    double s = t / tau;
    return s < 0.5 ? 2.0 * d * s * s : -d + 4.0 * d * s - 2.0 * d * s * s;
  };
  auto xdot = [&](double t) {
    double s = t / tau;
    return s < 0.5 ? 4.0 * d * t / (tau * tau)
                   : 4.0 * d * (tau - t) / (tau * tau);
  };
  auto xddot_mag = 4.0 * d / (tau * tau);
  double acc = 0.0;
  double prev_speed = 0.0;
  for (int i = 0; i <= n; ++i) {
    double t = tau * i / n;
    m.t[static_cast<size_t>(i)] = t;
    m.re_alpha[static_cast<size_t>(i)] = xbar(t) / (2.0 * sx);
    m.im_alpha[static_cast<size_t>(i)] = mass * xdot(t) / (2.0 * sp);
    double dre = xdot(t) / (2.0 * sx);
    double dim = mass * xddot_mag / (2.0 * sp);
    double speed = std::hypot(dre, dim);
    if (i > 0) acc += 0.5 * (prev_speed + speed) * (tau / n);
    prev_speed = speed;
  }
  m.length_quadrature = acc;
  m.length_closed_form = l_qb_estimate(d, tau, p);
  m.mid_velocity = xdot(tau / 2.0);
  return m;
}

nlohmann::json GeometryReport::to_json() const {
  nlohmann::json j;
  j["ell"] = ell;
  j["delta_e"] = delta_e;
  j["ell_geo"] = ell_geo;
  j["ell_qgt"] = ell_qgt;
  j["ell_qb_est"] = ell_qb_est;
  j["delta_e_upper"] = delta_e_upper;
  j["tau_mt"] = tau_mt;
  j["aa_residual"] = aa_residual;
  j["bound_flags"] = {{"tau_above_cb", tau_above_cb},
                      {"ell_above_qgt", ell_above_qgt},
                      {"ell_over_geo", ell_over_geo}};
  j["tau"] = tau;
  j["d"] = d;
  j["u0"] = u0;
  return j;
}

GeometryReport bound_report(const std::vector<WaveFunction>& states,
                            const std::vector<double>& times,
                            const Potential1D& pot, const Trajectory& traj,
                            const LatticeParams& p, const WaveFunction& init,
                            const WaveFunction& target) {
  if (states.empty()) throw ConfigError("bound report needs logged states");
  GeometryReport r;
  r.tau = traj.tau();
  r.d = traj.d();
  r.u0 = p.u0;
  r.ell = path_length(states);
  r.delta_e = average_energy_spread(states, times, pot);
  r.ell_geo = std::acos(std::min(1.0, std::abs(overlap(target, init))));
  r.ell_qgt = l_qgt(traj.d(), p);
  r.ell_qb_est = l_qb_estimate(traj.d(), traj.tau(), p);
  r.delta_e_upper = conveyor::delta_e_upper(traj.d(), traj.tau(), p);
  r.tau_mt = mandelstam_tamm_time(init, target, r.delta_e);
  double span = times.back() - times.front();
  r.aa_residual = std::fabs(r.ell - r.delta_e * span) / r.ell;
  r.tau_above_cb = traj.tau() >= tau_cb(traj.d(), p);
  r.ell_above_qgt = r.ell >= r.ell_qgt;
  r.ell_over_geo = r.ell_geo > 0.0 ? r.ell / r.ell_geo : 0.0;
  return r;
}

GeometryRun propagate_logged(const WaveFunction& psi0, const Potential1D& pot,
                             double t0, double t1, double dt,
                             int sample_every) {
  for (int se = sample_every; se >= 1; se /= 2) {
    StateLog log;
    log.sample_every = se;
    PropagateOptions opt;
    opt.log = &log;
    WaveFunction fin = propagate(psi0, pot, t0, t1, dt, opt);
    bool fine = true;
    for (size_t k = 0; k + 1 < log.states.size() && fine; ++k)
      if (std::abs(overlap(log.states[k + 1], log.states[k])) < 0.99)
        fine = false;
    if (fine || se == 1)
      return {std::move(fin), std::move(log.states), std::move(log.times)};
  }
  throw ResolutionError("geometry sampling could not be refined enough");
}

}  // namespace conveyor
