#include "conveyor/propagator.hpp"

#include <cmath>
#include <complex>

#include "conveyor/errors.hpp"
#include "conveyor/fft.hpp"

namespace conveyor {

using cplx = std::complex<double>;

WaveFunction propagate(WaveFunction psi, const Potential1D& pot, double t0,
                       double t1, double dt, const PropagateOptions& opt,
                       PropagateInfo* info) {
  if (!(dt > 0.0)) throw ConfigError("propagate needs dt > 0");
  const Grid& g = psi.grid();
  const int n = g.size();
  double span = t1 - t0;
  if (span <= 0.0) return psi;
  int steps = std::max(1, static_cast<int>(std::ceil(span / dt - 1e-12)));
  double h = span / steps;

  Fft fft(n);
  std::vector<double> v(static_cast<size_t>(n));
  std::vector<cplx> kin(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double p = g.momentum(i);
    kin[static_cast<size_t>(i)] = std::polar(1.0, -p * p * h);
  }

  if (opt.log) {
    opt.log->times.push_back(t0);
    opt.log->states.push_back(psi);
  }

  bool tail_warn = false;
  for (int s = 0; s < steps; ++s) {
    double tm = t0 + (s + 0.5) * h;
    pot.sample(g, tm, v.data());
    for (int i = 0; i < n; ++i)
      psi[i] *= std::polar(1.0, -0.5 * v[static_cast<size_t>(i)] * h);
    fft.forward(psi.data());
    for (int i = 0; i < n; ++i) psi[i] *= kin[static_cast<size_t>(i)];
    fft.inverse(psi.data());
    for (int i = 0; i < n; ++i)
      psi[i] *= std::polar(1.0, -0.5 * v[static_cast<size_t>(i)] * h);
    if (opt.log && ((s + 1) % opt.log->sample_every == 0 || s + 1 == steps)) {
      opt.log->times.push_back(t0 + (s + 1) * h);
      opt.log->states.push_back(psi);
    }
  }

  if (opt.check_momentum_tail)
    tail_warn = momentum_tail(psi, 0.9) > 1e-8;
  if (info) {
    info->final_norm_drift = std::fabs(psi.norm() - 1.0);
    info->tail_warning = tail_warn;
  }
  return psi;
}

namespace {

// one imaginary-time Strang step with step size h, then renormalize
void imag_step(WaveFunction& psi, const Fft& fft, const std::vector<double>& v,
               const std::vector<double>& kin_decay, double h) {
  int n = psi.size();
  for (int i = 0; i < n; ++i)
    psi[i] *= std::exp(-0.5 * v[static_cast<size_t>(i)] * h);
  fft.forward(psi.data());
  for (int i = 0; i < n; ++i) psi[i] *= kin_decay[static_cast<size_t>(i)];
  fft.inverse(psi.data());
  for (int i = 0; i < n; ++i)
    psi[i] *= std::exp(-0.5 * v[static_cast<size_t>(i)] * h);
  psi.normalize();
}

double energy_of(const WaveFunction& psi, const std::vector<double>& v,
                 const Fft& fft) {
  // <p^2> spectrally + <V> pointwise
  int n = psi.size();
  const Grid& g = psi.grid();
  std::vector<cplx> tmp(psi.data(), psi.data() + n);
  fft.forward(tmp.data());
  double norm = 0.0, ke = 0.0;
  for (int i = 0; i < n; ++i) {
    double pr = std::norm(tmp[static_cast<size_t>(i)]);
    double p = g.momentum(i);
    norm += pr;
    ke += pr * p * p;
  }
  ke /= norm;
  double pe = 0.0, w = 0.0;
  for (int i = 0; i < n; ++i) {
    double pr = std::norm(psi[i]);
    pe += pr * v[static_cast<size_t>(i)];
    w += pr;
  }
  pe /= w;
  return ke + pe;
}

}  // namespace

WaveFunction ground_state(const Grid& g, const LatticeParams& p,
                          const Potential1D& pot, int site, double t_freeze) {
  std::vector<double> v(static_cast<size_t>(g.size()));
  pot.sample(g, t_freeze, v.data());

  Fft fft(g.size());
  WaveFunction psi = gaussian_packet(g, g.site_center(site), p.sigma_x());

  // Coarse stage relaxes fast; the fine stage removes the splitting bias of
  // the coarse step from the converged state.
  const double stages[] = {p.tau_ho() / 64.0, p.tau_ho() / 512.0};
  std::vector<double> kin_decay(static_cast<size_t>(g.size()));
  for (double h : stages) {
    for (int i = 0; i < g.size(); ++i) {
      double pm = g.momentum(i);
      kin_decay[static_cast<size_t>(i)] = std::exp(-pm * pm * h);
    }
    double e_prev = energy_of(psi, v, fft);
    const int cap = 200000;
    bool done = false;
    for (int it = 0; it < cap && !done; ++it) {
      imag_step(psi, fft, v, kin_decay, h);
      if (it % 8 == 7) {
        double e = energy_of(psi, v, fft);
        if (std::fabs(e - e_prev) < 1e-12 * 8) done = true;
        e_prev = e;
      }
    }
    if (!done)
      throw ConvergenceError("imaginary-time ground state did not converge");
  }
  return psi;
}

WaveFunction lattice_ground_state(const Grid& g, const LatticeParams& p,
                                  int site, double offset) {
  LatticePotential pot(p, hold_position(offset), 0.0);
  return ground_state(g, p, pot, site);
}

namespace {

// H psi with H = p^2 + V(t)
std::vector<cplx> apply_h(const WaveFunction& psi, const std::vector<double>& v,
                          const Fft& fft) {
  int n = psi.size();
  const Grid& g = psi.grid();
  std::vector<cplx> hp(psi.data(), psi.data() + n);
  fft.forward(hp.data());
  for (int i = 0; i < n; ++i) {
    double p = g.momentum(i);
    hp[static_cast<size_t>(i)] *= p * p;
  }
  fft.inverse(hp.data());
  for (int i = 0; i < n; ++i) hp[static_cast<size_t>(i)] += v[static_cast<size_t>(i)] * psi[i];
  return hp;
}

}  // namespace

double mean_energy(const WaveFunction& psi, const Potential1D& pot, double t) {
  const Grid& g = psi.grid();
  std::vector<double> v(static_cast<size_t>(g.size()));
  pot.sample(g, t, v.data());
  Fft fft(g.size());
  auto hp = apply_h(psi, v, fft);
  cplx e = 0.0;
  for (int i = 0; i < g.size(); ++i) e += std::conj(psi[i]) * hp[static_cast<size_t>(i)];
  return (e * g.dx()).real();
}

double energy_spread(const WaveFunction& psi, const Potential1D& pot, double t) {
  const Grid& g = psi.grid();
  std::vector<double> v(static_cast<size_t>(g.size()));
  pot.sample(g, t, v.data());
  Fft fft(g.size());
  auto hp = apply_h(psi, v, fft);
  // <H> and <H^2> = ||H psi||^2 for normalized psi
  cplx e1 = 0.0;
  double e2 = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    e1 += std::conj(psi[i]) * hp[static_cast<size_t>(i)];
    e2 += std::norm(hp[static_cast<size_t>(i)]);
  }
  double m1 = (e1 * g.dx()).real();
  double m2 = e2 * g.dx();
  double var = m2 - m1 * m1;
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

double kinetic_spread(const WaveFunction& psi) {
  const Grid& g = psi.grid();
  int n = g.size();
  Fft fft(n);
  std::vector<cplx> tmp(psi.data(), psi.data() + n);
  fft.forward(tmp.data());
  double norm = 0.0, m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double pr = std::norm(tmp[static_cast<size_t>(i)]);
    double k = g.momentum(i);
    double e = k * k;
    norm += pr;
    m1 += pr * e;
    m2 += pr * e * e;
  }
  m1 /= norm;
  m2 /= norm;
  double var = m2 - m1 * m1;
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

double potential_spread(const WaveFunction& psi, const Potential1D& pot,
                        double t) {
  const Grid& g = psi.grid();
  std::vector<double> v(static_cast<size_t>(g.size()));
  pot.sample(g, t, v.data());
  double norm = 0.0, m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    double pr = std::norm(psi[i]);
    double e = v[static_cast<size_t>(i)];
    norm += pr;
    m1 += pr * e;
    m2 += pr * e * e;
  }
  m1 /= norm;
  m2 /= norm;
  double var = m2 - m1 * m1;
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

double default_dt(const LatticeParams& p) { return p.tau_ho() / 512.0; }

}  // namespace conveyor
