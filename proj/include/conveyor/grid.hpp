#pragma once

#include <complex>
#include <vector>

#include "conveyor/lattice.hpp"

namespace conveyor {

// Periodic position grid covering n_sites lattice sites. Point count per site
// must be a power of two so the total is FFT-friendly. Momentum grid follows
// the usual DFT layout: index j maps to p_j = 2*pi*j/L for j < N/2 and
// p_j - 2*pi*N/L above.
struct Grid {
  int n_sites = 16;
  int pts_per_site = 64;

  int size() const { return n_sites * pts_per_site; }
  double length() const { return n_sites * kSite; }
  double dx() const { return kSite / pts_per_site; }
  double x(int i) const { return i * dx(); }
  double momentum(int j) const {
    int n = size();
    int jj = j < n / 2 ? j : j - n;
    return 2.0 * kSite * jj / length();
  }
  double p_max() const { return kSite / dx(); }
  double site_center(int s) const { return s * kSite; }
  int home_site() const { return n_sites / 2; }

  bool operator==(const Grid&) const = default;
};

Grid make_grid(int n_sites, int pts_per_site);

class WaveFunction {
 public:
  WaveFunction() = default;
  explicit WaveFunction(const Grid& g)
      : grid_(g), amp_(static_cast<size_t>(g.size())) {}

  const Grid& grid() const { return grid_; }
  int size() const { return static_cast<int>(amp_.size()); }
  std::complex<double>& operator[](int i) { return amp_[static_cast<size_t>(i)]; }
  const std::complex<double>& operator[](int i) const {
    return amp_[static_cast<size_t>(i)];
  }
  std::complex<double>* data() { return amp_.data(); }
  const std::complex<double>* data() const { return amp_.data(); }

  double norm() const;           // sqrt(integral |psi|^2 dx)
  void normalize();
  double mean_x() const;         // <x>, meaningful while the packet is away from the wrap
  double var_x() const;
  double mean_p() const;
  double var_p() const;          // spectral second moment

  // Cyclic shift by whole grid points (exact lattice-site translations).
  WaveFunction shifted_sites(int sites) const;

 private:
  Grid grid_;
  std::vector<std::complex<double>> amp_;
};

// <a|b> = integral conj(a) b dx
std::complex<double> overlap(const WaveFunction& a, const WaveFunction& b);

// |<target|psi>|^2
double fidelity(const WaveFunction& psi, const WaveFunction& target);

// Fraction of momentum-space probability with |p| > frac * p_max.
double momentum_tail(const WaveFunction& psi, double frac);

// Gaussian packet, normalized on the grid.
WaveFunction gaussian_packet(const Grid& g, double x0, double sigma, double p0 = 0.0);

}  // namespace conveyor
