#pragma once

#include <vector>

#include "conveyor/lattice.hpp"

namespace conveyor {

// One Bloch band of the cos^2 lattice, energies relative to the barrier top
// (potential maximum at 0, well bottom at -u0).
struct BandInfo {
  double lower = 0.0;
  double upper = 0.0;
  double center() const { return 0.5 * (lower + upper); }
  double width() const { return upper - lower; }
};

// Band edges from the plane-wave eigenproblem at the zone center and edge.
std::vector<BandInfo> band_structure(const LatticeParams& p, int n_bands);

// Bands lying entirely in the wells on average (center below the barrier).
int bound_levels(const LatticeParams& p);

// Bound bands whose tunneling splitting is negligible on the trap timescale:
// width * tau_ho < 0.25. These are the levels a site-local control can
// address coherently.
int controlled_levels(const LatticeParams& p);

}  // namespace conveyor
