#include "conveyor/detection.hpp"

#include <cmath>

#include "conveyor/potentials.hpp"
#include "conveyor/propagator.hpp"

namespace conveyor {

double ground_band_population(const WaveFunction& psi, const LatticeParams& p,
                              double final_offset) {
  const Grid& g = psi.grid();
  int j0 = static_cast<int>(std::lround(final_offset / kSite));
  // ground state in the well nearest final_offset; all other wells are exact
  // lattice translations of it
  LatticePotential pot(p, hold_position(final_offset), 0.0);
  int seed_site = ((j0 % g.n_sites) + g.n_sites) % g.n_sites;
  WaveFunction gs = ground_state(g, p, pot, seed_site);
  double tot = 0.0;
  for (int s = 0; s < g.n_sites; ++s) {
    WaveFunction b = gs.shifted_sites(s - seed_site);
    tot += fidelity(psi, b);
  }
  return tot;
}

}  // namespace conveyor
