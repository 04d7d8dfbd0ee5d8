#include "conveyor/grid.hpp"

#include <cmath>

#include "conveyor/errors.hpp"
#include "conveyor/fft.hpp"

namespace conveyor {

Grid make_grid(int n_sites, int pts_per_site) {
  if (n_sites < 2) throw ConfigError("grid needs at least 2 sites");
  if (pts_per_site < 4 || (pts_per_site & (pts_per_site - 1)) != 0)
    throw ConfigError("pts_per_site must be a power of two >= 4");
  return Grid{n_sites, pts_per_site};
}

double WaveFunction::norm() const {
  double s = 0.0;
  for (const auto& a : amp_) s += std::norm(a);
  return std::sqrt(s * grid_.dx());
}

void WaveFunction::normalize() {
  double n = norm();
  if (n == 0.0) throw ConvergenceError("cannot normalize zero state");
  double inv = 1.0 / n;
  for (auto& a : amp_) a *= inv;
}

double WaveFunction::mean_x() const {
  double s = 0.0, w = 0.0;
  for (int i = 0; i < size(); ++i) {
    double p = std::norm(amp_[static_cast<size_t>(i)]);
    s += p * grid_.x(i);
    w += p;
  }
  return s / w;
}

double WaveFunction::var_x() const {
  double mu = mean_x();
  double s = 0.0, w = 0.0;
  for (int i = 0; i < size(); ++i) {
    double p = std::norm(amp_[static_cast<size_t>(i)]);
    double d = grid_.x(i) - mu;
    s += p * d * d;
    w += p;
  }
  return s / w;
}

namespace {
// momentum-space probabilities (unnormalized DFT, constant weight)
std::vector<double> momentum_prob(const WaveFunction& psi) {
  Fft fft(psi.size());
  std::vector<std::complex<double>> tmp(psi.data(), psi.data() + psi.size());
  fft.forward(tmp.data());
  std::vector<double> pr(tmp.size());
  double tot = 0.0;
  for (size_t i = 0; i < tmp.size(); ++i) {
    pr[i] = std::norm(tmp[i]);
    tot += pr[i];
  }
  for (auto& v : pr) v /= tot;
  return pr;
}
}  // namespace

double WaveFunction::mean_p() const {
  auto pr = momentum_prob(*this);
  double s = 0.0;
  for (size_t i = 0; i < pr.size(); ++i)
    s += pr[i] * grid_.momentum(static_cast<int>(i));
  return s;
}

double WaveFunction::var_p() const {
  auto pr = momentum_prob(*this);
  double mu = 0.0;
  for (size_t i = 0; i < pr.size(); ++i)
    mu += pr[i] * grid_.momentum(static_cast<int>(i));
  double s = 0.0;
  for (size_t i = 0; i < pr.size(); ++i) {
    double d = grid_.momentum(static_cast<int>(i)) - mu;
    s += pr[i] * d * d;
  }
  return s;
}

WaveFunction WaveFunction::shifted_sites(int sites) const {
  WaveFunction out(grid_);
  int n = size();
  int shift = sites * grid_.pts_per_site;
  shift = ((shift % n) + n) % n;
  for (int i = 0; i < n; ++i)
    out[(i + shift) % n] = amp_[static_cast<size_t>(i)];
  return out;
}

std::complex<double> overlap(const WaveFunction& a, const WaveFunction& b) {
  if (!(a.grid() == b.grid()))
    throw ConfigError("overlap of states on different grids");
  std::complex<double> s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * a.grid().dx();
}

double fidelity(const WaveFunction& psi, const WaveFunction& target) {
  return std::norm(overlap(target, psi));
}

double momentum_tail(const WaveFunction& psi, double frac) {
  auto pr = momentum_prob(psi);
  double cut = frac * psi.grid().p_max();
  double s = 0.0;
  for (size_t i = 0; i < pr.size(); ++i)
    if (std::fabs(psi.grid().momentum(static_cast<int>(i))) > cut) s += pr[i];
  return s;
}

WaveFunction gaussian_packet(const Grid& g, double x0, double sigma, double p0) {
  WaveFunction psi(g);
  // center the Gaussian accounting for periodic wrap
  double L = g.length();
  for (int i = 0; i < g.size(); ++i) {
    double d = g.x(i) - x0;
    d -= L * std::round(d / L);
    psi[i] = std::polar(std::exp(-d * d / (4.0 * sigma * sigma)), p0 * g.x(i));
  }
  psi.normalize();
  return psi;
}

}  // namespace conveyor
