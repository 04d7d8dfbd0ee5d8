#pragma once

#include "conveyor/grid.hpp"
#include "conveyor/lattice.hpp"
#include "conveyor/trajectory.hpp"

namespace conveyor {

struct InterferometerResult {
  double contrast = 0.0;  // |<psi_down(2 tau)|psi_up(2 tau)>|
  double f2 = 0.0;        // round-trip fidelity |<psi_init|psi_up(2 tau)>|^2
  double sqrt_f2 = 0.0;
};

// Beam intensities giving a secondary lattice of depth u0 at aligned phases,
// split l:r by the given ratio (i_l = ratio * i_r).
SpinDownField balanced_field(double u0, double intensity_ratio = 1.0);

// Two-arm sequence: the conveyor arm rides traj out and back (duration
// 2 tau); the stationary arm sits in the secondary lattice whose r-phase
// follows the conveyor, with the l-phase either compensating (trap pinned)
// or frozen. Returns the arm overlap and the round-trip fidelity.
InterferometerResult interferometer_contrast(const Trajectory& traj,
                                             const LatticeParams& p,
                                             const SpinDownField& field,
                                             bool compensate, const Grid& g,
                                             double dt);

}  // namespace conveyor
