#include <doctest.h>

#include "gibbsprep/models.hpp"
#include "gibbsprep/stabilizer.hpp"
#include "helpers.hpp"

using namespace gibbsprep;
using gibbsprep::testing::max_abs_diff;

namespace {

DenseOp site_density(Axis a, int sign) {
    return 0.5 * (DenseOp::Identity(2, 2) +
                  static_cast<double>(sign) * pauli_to_dense(PauliString::single(1, 0, a)));
}

// Exact expectation of the sampling distribution for a single-block
// configuration: mixing branch plus even-parity correlated branch, every
// uniform site expanded over all six stabilizer states.
DenseOp enumerate_block_expectation(const ConfigBlock& b, int n) {
    const long dim = 1L << n;
    double cr = b.x.is_zero() ? 0.0 : b.c * b.x.value->coeff;
    const PauliString p =
        b.x.is_zero() ? PauliString::identity(n) : b.x.value->pauli;
    bool correlated_possible = !p.is_identity_body() && cr != 0.0;

    // per-site average over the six uniform stabilizer states is I/2
    auto uniform_avg = [&]() { return DenseOp::Identity(2, 2) / 2.0; };

    DenseOp mix = DenseOp::Identity(1, 1);
    for (int site = 0; site < n; ++site) {
        DenseOp m = uniform_avg();
        DenseOp next(2 * mix.rows(), 2 * mix.cols());
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                next.block(i * mix.rows(), j * mix.cols(), mix.rows(), mix.cols()) = m(i, j) * mix;
        mix = next;
    }
    if (!correlated_possible) return mix;

    std::vector<int> supp = p.support().to_indices();
    int parity = cr > 0 ? 1 : -1;
    DenseOp corr = DenseOp::Zero(dim, dim);
    int k = static_cast<int>(supp.size());
    int strings = 0;
    for (int bits = 0; bits < (1 << k); ++bits) {
        int prod = 1;
        for (int i = 0; i < k; ++i) prod *= (bits >> i & 1) ? -1 : 1;
        if (prod != parity) continue;
        ++strings;
        DenseOp state = DenseOp::Identity(1, 1);
        for (int site = 0; site < n; ++site) {
            auto it = std::find(supp.begin(), supp.end(), site);
            DenseOp m = (it == supp.end())
                            ? uniform_avg()
                            : site_density(p.axis_at(site),
                                           (bits >> (it - supp.begin()) & 1) ? -1 : 1);
            DenseOp next(2 * state.rows(), 2 * state.cols());
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    next.block(i * state.rows(), j * state.cols(), state.rows(), state.cols()) =
                        m(i, j) * state;
            state = next;
        }
        corr += state;
    }
    corr /= strings;
    return std::abs(cr) * corr + (1.0 - std::abs(cr)) * mix;
}

ConfigBlock random_block(int n, Rng& rng, int max_support) {
    ConfigBlock b;
    int size = 1 + rng.uniform_index(max_support);
    std::vector<std::pair<int, Axis>> axes;
    std::vector<int> sites;
    while (static_cast<int>(sites.size()) < size) {
        int s = rng.uniform_index(n);
        if (std::find(sites.begin(), sites.end(), s) == sites.end()) sites.push_back(s);
    }
    std::sort(sites.begin(), sites.end());
    for (int s : sites) axes.push_back({s, static_cast<Axis>(1 + rng.uniform_index(3))});
    double r = 2.0 * rng.uniform_double() - 1.0;
    if (r == 0.0) r = 0.5;
    b.c = 2.0 * rng.uniform_double() - 1.0;
    b.x.value = ScaledPauli{r, PauliString::from_axes(n, axes)};
    b.x.degree = 1;
    b.x.formal_support = b.x.value->pauli.support();
    return b;
}

} // namespace

TEST_CASE("empty configuration: expected density is maximally mixed") {
    Configuration empty;
    DenseOp expected = enumerate_block_expectation(ConfigBlock{}, 3);
    CHECK(max_abs_diff(expected, DenseOp::Identity(8, 8) / 8.0) <= 1e-15);

    // statistical tie to the sampler itself
    Rng rng(1);
    DenseOp mean = DenseOp::Zero(8, 8);
    const int reps = 20000;
    for (int i = 0; i < reps; ++i) mean += product_state_density(sample_state(empty, 3, rng));
    mean /= reps;
    CHECK(trace_distance(mean, DenseOp::Identity(8, 8) / 8.0) <= 0.02);
}

TEST_CASE("c = 1 ZZ block: the two even-parity strings average to (I + ZZ)/4") {
    ConfigBlock b;
    b.c = 1.0;
    b.x.value = ScaledPauli{1.0, PauliString::from_axes(2, {{0, Axis::Z}, {1, Axis::Z}})};
    b.x.formal_support = b.x.value->pauli.support();
    DenseOp expected = enumerate_block_expectation(b, 2);
    DenseOp target =
        (DenseOp::Identity(4, 4) + pauli_to_dense(b.x.value->pauli)) / 4.0;
    CHECK(max_abs_diff(expected, target) <= 1e-15);
}

TEST_CASE("zero-valued and identity-valued blocks are maximally mixed") {
    ConfigBlock zero;
    zero.c = 0.7;
    zero.x.value = std::nullopt;
    zero.x.formal_support = Bits::from_indices(3, {0, 1});
    Configuration config{{zero}};
    Rng rng(3);
    DenseOp mean = DenseOp::Zero(8, 8);
    const int reps = 20000;
    for (int i = 0; i < reps; ++i) mean += product_state_density(sample_state(config, 3, rng));
    mean /= reps;
    CHECK(trace_distance(mean, DenseOp::Identity(8, 8) / 8.0) <= 0.02);
}

TEST_CASE("block-level enumeration reproduces (I + cX)/tr(I + cX) exactly") {
    Rng rng(5);
    int checked = 0;
    for (int rep = 0; rep < 200; ++rep) {
        int n = 4;
        ConfigBlock b = random_block(n, rng, 4);
        Configuration config{{b}};
        DenseOp sigma = evaluate_config_dense(config, n);
        DenseOp target = sigma / sigma.trace().real();
        CHECK(max_abs_diff(enumerate_block_expectation(b, n), target) <= 1e-12);
        ++checked;
    }
    CHECK(checked == 200);
}

TEST_CASE("sampler matches the enumerated distribution statistically") {
    Rng rng(7);
    ConfigBlock b;
    b.c = 0.6;
    b.x.value = ScaledPauli{-0.8, PauliString::from_axes(3, {{0, Axis::X}, {2, Axis::Y}})};
    b.x.formal_support = b.x.value->pauli.support();
    Configuration config{{b}};
    DenseOp expected = enumerate_block_expectation(b, 3);

    DenseOp mean = DenseOp::Zero(8, 8);
    const int reps = 50000;
    for (int i = 0; i < reps; ++i) mean += product_state_density(sample_state(config, 3, rng));
    mean /= reps;
    CHECK(trace_distance(mean, expected) <= 0.02);
}

TEST_CASE("correlated strings always have the sign parity of c r") {
    ConfigBlock b;
    b.c = -1.0; // forces the correlated branch with negative parity
    b.x.value = ScaledPauli{1.0, PauliString::from_axes(2, {{0, Axis::Z}, {1, Axis::Z}})};
    b.x.formal_support = b.x.value->pauli.support();
    Configuration config{{b}};
    Rng rng(9);
    for (int i = 0; i < 2000; ++i) {
        ProductState st = sample_state(config, 2, rng);
        CHECK(st.sites[0].sign * st.sites[1].sign == -1);
        CHECK(st.sites[0].axis == Axis::Z);
    }
}

TEST_CASE("invariant error on |c r| > 1") {
    ConfigBlock b;
    b.c = 1.4;
    b.x.value = ScaledPauli{0.9, PauliString::single(1, 0, Axis::Z)};
    b.x.formal_support = Bits::from_indices(1, {0});
    Configuration config{{b}};
    Rng rng(11);
    CHECK_THROWS_AS(sample_state(config, 1, rng), std::logic_error);
}

TEST_CASE("output is a total function with valid axes and signs") {
    Hamiltonian h = chain_tfim(4);
    Rng rng(13);
    Configuration config = run_separability(h, h.critical_beta(BetaMode::Separability) / 2, rng);
    ProductState st = sample_state(config, 4, rng);
    REQUIRE(st.size() == 4);
    for (const SiteState& s : st.sites) {
        CHECK((s.axis == Axis::X || s.axis == Axis::Y || s.axis == Axis::Z));
        CHECK((s.sign == 1 || s.sign == -1));
    }
    nlohmann::json j = product_state_to_json(st);
    ProductState back = product_state_from_json(j);
    for (int i = 0; i < 4; ++i) {
        CHECK(back.sites[i].axis == st.sites[i].axis);
        CHECK(back.sites[i].sign == st.sites[i].sign);
    }
}
