#pragma once

#include <complex>
#include <vector>

#include "gibbsprep/dense.hpp"
#include "gibbsprep/hamiltonian.hpp"
#include "gibbsprep/rng.hpp"

namespace gibbsprep::testing {

inline double max_abs_diff(const DenseOp& a, const DenseOp& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline PauliString random_pauli(int n, Rng& rng, bool random_phase = true) {
    Bits x(n), z(n);
    for (int i = 0; i < n; ++i) {
        if (rng.fair_coin()) x.set(i);
        if (rng.fair_coin()) z.set(i);
    }
    int phase = random_phase ? rng.uniform_index(4) : 0;
    return PauliString(n, x, z, phase);
}

// Random bare Hermitian Pauli with nonempty support.
inline PauliString random_bare_pauli(int n, Rng& rng) {
    for (;;) {
        PauliString p = random_pauli(n, rng, false);
        if (p.support().any()) return p.bare();
    }
}

inline Bits random_site_set(int n, Rng& rng) {
    Bits s(n);
    for (int i = 0; i < n; ++i)
        if (rng.fair_coin()) s.set(i);
    return s;
}

} // namespace gibbsprep::testing
