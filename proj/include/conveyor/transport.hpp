#pragma once

#include "conveyor/grid.hpp"
#include "conveyor/lattice.hpp"
#include "conveyor/trajectory.hpp"

namespace conveyor {

struct TransportResult {
  double fidelity = 0.0;            // site-resolved
  double detection_fidelity = 0.0;  // ground-band population, all sites
  bool tail_warning = false;
};

// Caches the prepared initial and target states for repeated evaluations of
// trajectories sharing (params, grid, d). Immutable after construction; safe
// to share across threads.
class TransportContext {
 public:
  TransportContext(const LatticeParams& p, const Grid& g, double d, double dt);

  TransportResult run(const Trajectory& traj, bool with_detection = true) const;
  // final state only (geometry pass wants the log; see geometry.hpp)
  WaveFunction propagate_only(const Trajectory& traj) const;

  const LatticeParams& params() const { return params_; }
  const Grid& grid() const { return grid_; }
  double dt() const { return dt_; }
  double start_center() const { return x0_; }
  const WaveFunction& initial_state() const { return psi0_; }
  const WaveFunction& target_state() const { return target_; }

 private:
  LatticeParams params_;
  Grid grid_;
  double d_;
  double dt_;
  double x0_;       // trap rest position (home site center)
  int target_site_; // site index of the target well
  WaveFunction psi0_;
  WaveFunction target_;
};

TransportResult transport_fidelity(const Trajectory& traj,
                                   const LatticeParams& p, const Grid& g,
                                   double dt);

}  // namespace conveyor
