#include "conveyor/thermal.hpp"

#include <cmath>

#include "conveyor/errors.hpp"
#include "conveyor/potentials.hpp"
#include "conveyor/propagator.hpp"
#include "conveyor/transport.hpp"

namespace conveyor {

TransportContext::TransportContext(const LatticeParams& p, const Grid& g,
                                   double d, double dt)
    : params_(p), grid_(g), d_(d), dt_(dt) {
  if (!(dt > 0.0)) throw ConfigError("transport context needs dt > 0");
  int home = g.home_site();
  x0_ = g.site_center(home);
  psi0_ = lattice_ground_state(g, p, home, x0_);
  double sites = d / kSite;
  int n = static_cast<int>(std::lround(sites));
  target_site_ = home + n;
  if (std::fabs(sites - n) < 1e-12) {
    target_ = psi0_.shifted_sites(n);
  } else {
    target_site_ = home + static_cast<int>(std::lround(sites));
    LatticePotential pot(p, hold_position(x0_ + d), 0.0);
    target_ = ground_state(g, p, pot,
                           ((target_site_ % g.n_sites) + g.n_sites) % g.n_sites);
  }
}

TransportResult TransportContext::run(const Trajectory& traj,
                                      bool with_detection) const {
  LatticePotential pot(params_, traj.fn(), x0_);
  PropagateOptions opt;
  opt.check_momentum_tail = true;
  PropagateInfo info;
  WaveFunction fin = propagate(psi0_, pot, 0.0, traj.tau(), dt_, opt, &info);
  TransportResult r;
  r.fidelity = fidelity(fin, target_);
  r.tail_warning = info.tail_warning;
  if (with_detection) {
    double tot = 0.0;
    for (int s = 0; s < grid_.n_sites; ++s)
      tot += fidelity(fin, target_.shifted_sites(s - target_site_));
    r.detection_fidelity = tot;
  }
  return r;
}

WaveFunction TransportContext::propagate_only(const Trajectory& traj) const {
  LatticePotential pot(params_, traj.fn(), x0_);
  return propagate(psi0_, pot, 0.0, traj.tau(), dt_);
}

TransportResult transport_fidelity(const Trajectory& traj,
                                   const LatticeParams& p, const Grid& g,
                                   double dt) {
  TransportContext ctx(p, g, traj.d(), dt);
  return ctx.run(traj);
}

double thermal_radius_um(const ThermalConfig& th, const LatticeParams& p) {
  double omega = 2.0 * kSite * th.omega_perp_hz;
  double m = p.mass_kg();
  double r0 = std::sqrt(kBoltzmann * th.t_perp_uk * 1e-6 / (m * omega * omega));
  return r0 * 1e6;
}

namespace {

void validate(const ThermalConfig& th) {
  if (!(th.t_perp_uk >= 0.0)) throw ConfigError("t_perp_uk must be >= 0");
  if (!(th.omega_perp_hz > 0.0)) throw ConfigError("omega_perp_hz must be > 0");
  if (!(th.waist_um > 0.0)) throw ConfigError("waist_um must be > 0");
  if (th.n_radii < 2) throw ConfigError("n_radii must be >= 2");
}

// xi where (xi) exp((1 - xi^2)/2) falls to 1e-6: the span of the radial
// distribution in units of its rms radius.
double xi_cutoff() {
  double lo = 1.0, hi = 12.0;
  auto f = [](double xi) {
    return xi * std::exp(0.5 * (1.0 - xi * xi)) - 1e-6;
  };
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

RadialRule radial_rule(const ThermalConfig& th, const LatticeParams& p,
                       int n_radii_override) {
  validate(th);
  int n = n_radii_override > 0 ? n_radii_override : th.n_radii;
  if (n < 2) throw ConfigError("radial rule needs >= 2 nodes");
  RadialRule rule;
  rule.r0_um = thermal_radius_um(th, p);
  double ximax = xi_cutoff();
  rule.radius_um.resize(static_cast<size_t>(n));
  rule.weight.resize(static_cast<size_t>(n));
  rule.depth_scale.resize(static_cast<size_t>(n));
  double wsum = 0.0;
  for (int i = 0; i < n; ++i) {
    double xi = ximax * i / (n - 1);
    double w = xi * std::exp(-0.5 * xi * xi);
    if (i == 0 || i == n - 1) w *= 0.5;
    rule.radius_um[static_cast<size_t>(i)] = xi * rule.r0_um;
    rule.weight[static_cast<size_t>(i)] = w;
    wsum += w;
    double rw = xi * rule.r0_um / th.waist_um;
    rule.depth_scale[static_cast<size_t>(i)] = std::exp(-2.0 * rw * rw);
  }
  for (auto& w : rule.weight) w /= wsum;
  return rule;
}

ThermalSet::ThermalSet(const LatticeParams& p, const ThermalConfig& th,
                       const Grid& g, double d, double dt,
                       int n_radii_override)
    : rule_(radial_rule(th, p, n_radii_override)) {
  ctxs_.reserve(rule_.weight.size());
  for (size_t i = 0; i < rule_.weight.size(); ++i) {
    LatticeParams pr(p.u0 * rule_.depth_scale[i], p.e_rec_hz, p.lambda_nm);
    ctxs_.emplace_back(pr, g, d, dt);
  }
}

TransportResult ThermalSet::run(const Trajectory& traj,
                                bool with_detection) const {
  TransportResult acc;
  for (size_t i = 0; i < ctxs_.size(); ++i) {
    TransportResult r = ctxs_[i].run(traj, with_detection);
    acc.fidelity += rule_.weight[i] * r.fidelity;
    acc.detection_fidelity += rule_.weight[i] * r.detection_fidelity;
    acc.tail_warning = acc.tail_warning || r.tail_warning;
  }
  return acc;
}

TransportResult thermal_fidelity(const Trajectory& traj, const LatticeParams& p,
                                 const ThermalConfig& th, const Grid& g,
                                 double dt, int n_radii_override) {
  ThermalSet set(p, th, g, traj.d(), dt, n_radii_override);
  return set.run(traj);
}

}  // namespace conveyor
