#include "gibbsprep/models.hpp"

#include <algorithm>
#include <stdexcept>

namespace gibbsprep {

namespace {

Term make_term(int n, double coeff, const std::vector<std::pair<int, Axis>>& axes) {
    Term t;
    t.coeff = coeff;
    t.pauli = SignedPauli(PauliString::from_axes(n, axes));
    return t;
}

} // namespace

Hamiltonian chain_tfim(int n, double jz, double jx) {
    if (n < 2) throw std::invalid_argument("chain_tfim: need n >= 2");
    std::vector<Term> terms;
    for (int i = 0; i + 1 < n; ++i)
        terms.push_back(make_term(n, jz, {{i, Axis::Z}, {i + 1, Axis::Z}}));
    for (int i = 0; i < n; ++i) terms.push_back(make_term(n, jx, {{i, Axis::X}}));
    return Hamiltonian(n, 2, std::move(terms));
}

Hamiltonian grid_zz(int rows, int cols, double j) {
    if (rows < 1 || cols < 1 || rows * cols < 2)
        throw std::invalid_argument("grid_zz: need at least two sites");
    int n = rows * cols;
    auto site = [&](int r, int c) { return r * cols + c; };
    std::vector<Term> terms;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols)
                terms.push_back(make_term(n, j, {{site(r, c), Axis::Z}, {site(r, c + 1), Axis::Z}}));
            if (r + 1 < rows)
                terms.push_back(make_term(n, j, {{site(r, c), Axis::Z}, {site(r + 1, c), Axis::Z}}));
        }
    return Hamiltonian(n, 2, std::move(terms));
}

Hamiltonian heisenberg_chain(int n, double j) {
    if (n < 2) throw std::invalid_argument("heisenberg_chain: need n >= 2");
    std::vector<Term> terms;
    for (int i = 0; i + 1 < n; ++i) {
        terms.push_back(make_term(n, j, {{i, Axis::X}, {i + 1, Axis::X}}));
        terms.push_back(make_term(n, j, {{i, Axis::Y}, {i + 1, Axis::Y}}));
        terms.push_back(make_term(n, j, {{i, Axis::Z}, {i + 1, Axis::Z}}));
    }
    return Hamiltonian(n, 2, std::move(terms));
}

Hamiltonian random_klocal(int n, int m, int locality, double coeff_min, double coeff_max,
                          uint64_t seed) {
    if (locality < 1 || locality > n)
        throw std::invalid_argument("random_klocal: need 1 <= locality <= n");
    if (coeff_min > coeff_max)
        throw std::invalid_argument("random_klocal: empty coefficient range");
    coeff_min = std::max(coeff_min, -1.0);
    coeff_max = std::min(coeff_max, 1.0);

    Rng rng(seed);
    static const Axis axes[3] = {Axis::X, Axis::Y, Axis::Z};
    std::vector<Term> terms;
    for (int i = 0; i < m; ++i) {
        std::vector<int> sites;
        while (static_cast<int>(sites.size()) < locality) {
            int s = rng.uniform_index(n);
            if (std::find(sites.begin(), sites.end(), s) == sites.end()) sites.push_back(s);
        }
        std::sort(sites.begin(), sites.end());
        std::vector<std::pair<int, Axis>> picks;
        for (int s : sites) picks.push_back({s, axes[rng.uniform_index(3)]});
        double coeff = coeff_min + (coeff_max - coeff_min) * rng.uniform_double();
        terms.push_back(make_term(n, coeff, picks));
    }
    return Hamiltonian(n, locality, std::move(terms));
}

Hamiltonian random_klocal_bounded_degree(int n, int m, int locality, int max_degree,
                                         uint64_t seed) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Hamiltonian h = random_klocal(n, m, locality, -1.0, 1.0, splitmix64(seed + attempt));
        if (h.degree() <= max_degree) return h;
    }
    throw std::runtime_error("random_klocal_bounded_degree: could not meet the degree bound");
}

} // namespace gibbsprep
