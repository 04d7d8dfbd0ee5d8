#include "conveyor/potentials.hpp"

#include <algorithm>
#include <cmath>

#include "conveyor/errors.hpp"

namespace conveyor {

PositionFn hold_position(double x) {
  return [x](double) { return x; };
}

LatticePotential::LatticePotential(const LatticeParams& p, PositionFn traj,
                                   double x0)
    : params_(p), traj_(std::move(traj)), x0_(x0) {}

void LatticePotential::sample(const Grid& g, double t, double* v) const {
  double c = center(t);
  double u0 = params_.u0;
  for (int i = 0; i < g.size(); ++i) {
    double cs = std::cos(g.x(i) - c);
    v[i] = -u0 * cs * cs;
  }
}

double LatticePotential::at(double x, double t) const {
  double cs = std::cos(x - center(t));
  return -params_.u0 * cs * cs;
}

HarmonicPotential::HarmonicPotential(const LatticeParams& p, PositionFn traj,
                                     double x0)
    : params_(p), traj_(std::move(traj)), x0_(x0) {}

void HarmonicPotential::sample(const Grid& g, double t, double* v) const {
  double c = x0_ + traj_(t);
  double u0 = params_.u0;
  double L = g.length();
  for (int i = 0; i < g.size(); ++i) {
    double d = g.x(i) - c;
    d -= L * std::round(d / L);
    v[i] = -u0 + u0 * d * d;
  }
}

double HarmonicPotential::at(double x, double t) const {
  double d = x - (x0_ + traj_(t));
  return -params_.u0 + params_.u0 * d * d;
}

SpinDownPotential::SpinDownPotential(const SpinDownField& base,
                                     PositionFn conveyor, double t_max,
                                     bool compensate, double x0, int table_size)
    : base_(base), t_max_(t_max), x0_(x0) {
  if (table_size < 2) throw ConfigError("phase table too small");
  phi_l_.resize(static_cast<size_t>(table_size));
  phi_r_.resize(static_cast<size_t>(table_size));
  SpinDownField f = base_;
  double x_hold = down_shape(f).center;
  double phi_l_prev = base_.phi_l;
  for (int i = 0; i < table_size; ++i) {
    double t = t_max_ * i / (table_size - 1);
    f.phi_r = base_.phi_r + kPhasePerPosition * conveyor(t);
    double pl = base_.phi_l;
    if (compensate) {
      pl = compensation_phase(f, x_hold, phi_l_prev);
      phi_l_prev = pl;
    }
    phi_l_[static_cast<size_t>(i)] = pl;
    phi_r_[static_cast<size_t>(i)] = f.phi_r;
  }
}

SpinDownShape SpinDownPotential::shape(double t) const {
  int n = static_cast<int>(phi_l_.size());
  double s = std::clamp(t / t_max_, 0.0, 1.0) * (n - 1);
  int i = std::min(static_cast<int>(s), n - 2);
  double w = s - i;
  SpinDownField f = base_;
  f.phi_l = (1 - w) * phi_l_[static_cast<size_t>(i)] +
            w * phi_l_[static_cast<size_t>(i + 1)];
  f.phi_r = (1 - w) * phi_r_[static_cast<size_t>(i)] +
            w * phi_r_[static_cast<size_t>(i + 1)];
  return down_shape(f);
}

void SpinDownPotential::sample(const Grid& g, double t, double* v) const {
  SpinDownShape s = shape(t);
  double c = x0_ + s.center;
  for (int i = 0; i < g.size(); ++i) {
    double cs = std::cos(g.x(i) - c);
    v[i] = -s.offset - s.depth * cs * cs;
  }
}

double SpinDownPotential::at(double x, double t) const {
  SpinDownShape s = shape(t);
  double cs = std::cos(x - (x0_ + s.center));
  return -s.offset - s.depth * cs * cs;
}

}  // namespace conveyor
