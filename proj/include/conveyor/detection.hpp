#pragma once

#include "conveyor/grid.hpp"
#include "conveyor/lattice.hpp"

namespace conveyor {

// Total ground-band population: sum over every site of the squared overlap
// with that site's ground state, for the lattice at rest with the trap at
// final_offset (box coordinates). Models a detector that cannot tell which
// site the atom occupies.
double ground_band_population(const WaveFunction& psi, const LatticeParams& p,
                              double final_offset);

}  // namespace conveyor
