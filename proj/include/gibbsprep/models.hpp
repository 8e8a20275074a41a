#pragma once

#include "gibbsprep/hamiltonian.hpp"
#include "gibbsprep/rng.hpp"

namespace gibbsprep {

// Transverse-field Ising chain: Z_i Z_{i+1} couplings plus X_i fields.
Hamiltonian chain_tfim(int n, double jz = 1.0, double jx = 1.0);

// Nearest-neighbor Z Z couplings on a rows x cols grid.
Hamiltonian grid_zz(int rows, int cols, double j = 1.0);

// Heisenberg chain emitted as three Pauli terms (XX, YY, ZZ) per edge.
Hamiltonian heisenberg_chain(int n, double j = 1.0);

// m random terms, each on `locality` distinct sites with random axes and a
// coefficient uniform in [coeff_min, coeff_max] (clipped to [-1, 1]).
Hamiltonian random_klocal(int n, int m, int locality, double coeff_min, double coeff_max,
                          uint64_t seed);

// Like random_klocal but regenerates until the dual-graph degree is at most
// max_degree; gives reproducible small test instances.
Hamiltonian random_klocal_bounded_degree(int n, int m, int locality, int max_degree,
                                         uint64_t seed);

} // namespace gibbsprep
