#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "conveyor/grid.hpp"
#include "conveyor/lattice.hpp"

namespace conveyor {

// Trap position as a function of time, recoil units.
using PositionFn = std::function<double(double)>;

// Time-dependent 1-D potential sampled on a grid. sample() is called once per
// propagation step with the midpoint time, so per-call work may be O(N).
class Potential1D {
 public:
  virtual ~Potential1D() = default;
  virtual void sample(const Grid& g, double t, double* v) const = 0;
  virtual double at(double x, double t) const = 0;
};

// Conveyor lattice V(x,t) = -u0 cos^2(x - x0 - traj(t)).
class LatticePotential : public Potential1D {
 public:
  LatticePotential(const LatticeParams& p, PositionFn traj, double x0);
  void sample(const Grid& g, double t, double* v) const override;
  double at(double x, double t) const override;
  double center(double t) const { return x0_ + traj_(t); }

 private:
  LatticeParams params_;
  PositionFn traj_;
  double x0_;
};

// Harmonic test mode: V = -u0 + u0*(x - center)^2, the quadratic expansion of
// the lattice well, with minimum-image distance so the periodic box stays
// consistent.
class HarmonicPotential : public Potential1D {
 public:
  HarmonicPotential(const LatticeParams& p, PositionFn traj, double x0);
  void sample(const Grid& g, double t, double* v) const override;
  double at(double x, double t) const override;

 private:
  LatticeParams params_;
  PositionFn traj_;
  double x0_;
};

// Secondary-lattice arm: the conveyor phase rides phi_r(t) = phi_r0 + 2*x(t)
// while phi_l either stays fixed or follows the compensation solution that
// pins the trap at its starting position. Phases are tabulated densely at
// construction (root finding per node, branch-tracked), then interpolated.
class SpinDownPotential : public Potential1D {
 public:
  SpinDownPotential(const SpinDownField& base, PositionFn conveyor, double t_max,
                    bool compensate, double x0, int table_size = 4096);
  void sample(const Grid& g, double t, double* v) const override;
  double at(double x, double t) const override;
  // trap parameters at time t (interpolated phases)
  SpinDownShape shape(double t) const;

 private:
  SpinDownField base_;
  double t_max_;
  double x0_;
  std::vector<double> phi_l_, phi_r_;
};

PositionFn hold_position(double x = 0.0);

}  // namespace conveyor
