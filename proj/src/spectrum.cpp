#include "conveyor/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "conveyor/errors.hpp"

namespace conveyor {

namespace {

// Eigenvalues of H = p^2 - u0 cos^2(x) in the plane-wave basis k = q + 2m:
// diagonal k^2 - u0/2, off-diagonal -u0/4 (from the cos(2x) coupling).
std::vector<double> quasimomentum_levels(double u0, double q, int n_levels) {
  const int M = 48;
  const int n = 2 * M + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double k = q + 2.0 * (i - M);
    h(i, i) = k * k - 0.5 * u0;
    if (i + 1 < n) {
      h(i, i + 1) = -0.25 * u0;
      h(i + 1, i) = -0.25 * u0;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  std::vector<double> out(static_cast<size_t>(n_levels));
  for (int i = 0; i < n_levels; ++i) out[static_cast<size_t>(i)] = es.eigenvalues()(i);
  return out;
}

}  // namespace

std::vector<BandInfo> band_structure(const LatticeParams& p, int n_bands) {
  if (n_bands < 1) throw ConfigError("need n_bands >= 1");
  auto e0 = quasimomentum_levels(p.u0, 0.0, n_bands);
  auto e1 = quasimomentum_levels(p.u0, 1.0, n_bands);
  std::vector<BandInfo> bands(static_cast<size_t>(n_bands));
  for (int j = 0; j < n_bands; ++j) {
    double a = e0[static_cast<size_t>(j)];
    double b = e1[static_cast<size_t>(j)];
    bands[static_cast<size_t>(j)] = {std::min(a, b), std::max(a, b)};
  }
  return bands;
}

int bound_levels(const LatticeParams& p) {
  auto bands = band_structure(p, 24);
  int n = 0;
  for (const auto& b : bands)
    if (b.center() < 0.0) ++n;
  return n;
}

int controlled_levels(const LatticeParams& p) {
  auto bands = band_structure(p, 24);
  double tho = p.tau_ho();
  int n = 0;
  for (const auto& b : bands)
    if (b.center() < 0.0 && b.width() * tho < 0.25) ++n;
  return n;
}

}  // namespace conveyor
