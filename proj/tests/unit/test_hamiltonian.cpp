#include <doctest.h>

#include "gibbsprep/models.hpp"
#include "helpers.hpp"

using namespace gibbsprep;

namespace {

Hamiltonian zz_chain(int n) {
    std::vector<Term> terms;
    for (int i = 0; i + 1 < n; ++i) {
        Term t;
        t.coeff = 1.0;
        t.pauli = SignedPauli(PauliString::from_axes(n, {{i, Axis::Z}, {i + 1, Axis::Z}}));
        terms.push_back(t);
    }
    return Hamiltonian(n, 2, std::move(terms));
}

} // namespace

TEST_CASE("3-site chain adjacency") {
    Hamiltonian h = zz_chain(3);
    CHECK(h.degree() == 1);
    CHECK(h.neighbors(0) == std::vector<int>{1});
    CHECK(h.neighbors(1) == std::vector<int>{0});
}

TEST_CASE("single term has no neighbors") {
    Hamiltonian h = zz_chain(2);
    CHECK(h.term_count() == 1);
    CHECK(h.degree() == 0);
    CHECK(h.neighbors(0).empty());
}

TEST_CASE("grid degrees match brute-force support intersection") {
    auto brute_check = [](const Hamiltonian& h) {
        int max_deg = 0;
        for (int a = 0; a < h.term_count(); ++a) {
            int deg = 0;
            for (int b = 0; b < h.term_count(); ++b)
                if (a != b && h.term_support(a).intersects(h.term_support(b))) ++deg;
            CHECK(static_cast<int>(h.neighbors(a).size()) == deg);
            max_deg = std::max(max_deg, deg);
        }
        CHECK(h.degree() == max_deg);
        return max_deg;
    };
    // 3x3: an interior edge sees 3 edges at its degree-4 endpoint and 2 at its
    // degree-3 endpoint; two adjacent degree-4 sites first appear on 3x4.
    CHECK(brute_check(grid_zz(3, 3)) == 5);
    CHECK(brute_check(grid_zz(3, 4)) == 6);
}

TEST_CASE("adjacency is symmetric on random instances") {
    for (uint64_t seed = 0; seed < 5; ++seed) {
        Hamiltonian h = random_klocal(6, 10, 3, -1.0, 1.0, seed);
        for (int a = 0; a < h.term_count(); ++a)
            for (int b : h.neighbors(a)) {
                const auto& back = h.neighbors(b);
                CHECK(std::binary_search(back.begin(), back.end(), a));
            }
    }
}

TEST_CASE("restricted and localized term sets") {
    Hamiltonian h = zz_chain(3);
    Bits all = Bits::all_set(3);
    CHECK(h.restricted_terms(all) == TermSet{0, 1});
    CHECK(h.restricted_terms(Bits(3)).empty());
    CHECK(h.localized_terms(Bits(3)).empty());

    Bits s01 = Bits::from_indices(3, {0, 1});
    CHECK(h.restricted_terms(s01) == TermSet{0});

    Bits s1 = Bits::from_indices(3, {1});
    CHECK(h.localized_terms(s1) == TermSet{0, 1});
}

TEST_CASE("localized set of one term's support has at most degree+1 elements") {
    Rng rng(5);
    for (uint64_t seed = 0; seed < 10; ++seed) {
        Hamiltonian h = random_klocal(7, 12, 2, -1.0, 1.0, seed);
        for (int a = 0; a < h.term_count(); ++a)
            CHECK(static_cast<int>(h.localized_terms(h.term_support(a)).size()) <=
                  h.degree() + 1);
    }
}

TEST_CASE("restricted terms with nonempty support are localized") {
    Rng rng(31);
    for (uint64_t seed = 0; seed < 10; ++seed) {
        Hamiltonian h = random_klocal(6, 8, 2, -1.0, 1.0, seed);
        Bits s = testing::random_site_set(6, rng);
        TermSet restricted = h.restricted_terms(s);
        TermSet localized = h.localized_terms(s);
        for (int a : restricted)
            CHECK(std::binary_search(localized.begin(), localized.end(), a));
    }
}

TEST_CASE("restricted(S) and localized(complement) partition the terms") {
    Rng rng(37);
    for (uint64_t seed = 0; seed < 10; ++seed) {
        Hamiltonian h = random_klocal(6, 9, 3, -1.0, 1.0, seed);
        Bits s = testing::random_site_set(6, rng);
        TermSet inside = h.restricted_terms(s);
        TermSet touching = h.localized_terms(~s);
        std::vector<int> merged = inside;
        merged.insert(merged.end(), touching.begin(), touching.end());
        std::sort(merged.begin(), merged.end());
        TermSet expected;
        for (int a = 0; a < h.term_count(); ++a) expected.push_back(a);
        CHECK(merged == expected); // no duplicates, nothing missing
    }
}

TEST_CASE("critical beta values") {
    Hamiltonian h = grid_zz(2, 2); // degree 2, locality 2
    CHECK(h.degree() == 2);
    CHECK(h.critical_beta(BetaMode::Separability) == doctest::Approx(1.0 / 400).epsilon(1e-12));
    CHECK(h.critical_beta(BetaMode::Sampling) == doctest::Approx(1.0 / 800).epsilon(1e-12));

    std::vector<Term> one;
    Term t;
    t.coeff = 1.0;
    t.pauli = SignedPauli(PauliString::single(2, 0, Axis::Z));
    one.push_back(t);
    Hamiltonian single(2, 1, std::move(one)); // degree 0 counts as 1
    CHECK(single.critical_beta(BetaMode::Cluster) == doctest::Approx(1.0 / 100).epsilon(1e-12));
}

TEST_CASE("build rejects bad terms") {
    auto term = [&](double coeff, std::vector<std::pair<int, Axis>> axes) {
        Term t;
        t.coeff = coeff;
        t.pauli = SignedPauli(PauliString::from_axes(3, axes));
        return t;
    };
    CHECK_THROWS_AS(Hamiltonian(3, 2, {term(1.5, {{0, Axis::Z}})}), std::invalid_argument);
    CHECK_THROWS_AS(Hamiltonian(3, 1, {term(1.0, {{0, Axis::Z}, {1, Axis::Z}})}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Hamiltonian(3, 2, {term(1.0, {})}), std::invalid_argument);
    CHECK_THROWS_AS(PauliString::from_axes(3, {{7, Axis::Z}}), std::invalid_argument);
}

TEST_CASE("file round trip is byte-identical") {
    Hamiltonian h = chain_tfim(4, 0.75, -0.25);
    std::string text = h.to_file_string();
    Hamiltonian parsed = Hamiltonian::from_file_string(text);
    CHECK(parsed.to_file_string() == text);
    CHECK(parsed.sites() == 4);
    CHECK(parsed.term_count() == 7);
    CHECK(parsed.degree() == h.degree());
}

TEST_CASE("file parser rejects unsorted or duplicate sites") {
    std::string bad_order =
        "{\"locality\":2,\"n\":3}\n"
        "{\"coeff\":1.0,\"paulis\":[{\"axis\":\"Z\",\"site\":1},{\"axis\":\"Z\",\"site\":0}]}\n";
    CHECK_THROWS_AS(Hamiltonian::from_file_string(bad_order), std::invalid_argument);
    std::string dup =
        "{\"locality\":2,\"n\":3}\n"
        "{\"coeff\":1.0,\"paulis\":[{\"axis\":\"Z\",\"site\":1},{\"axis\":\"X\",\"site\":1}]}\n";
    CHECK_THROWS_AS(Hamiltonian::from_file_string(dup), std::invalid_argument);
}

TEST_CASE("generator shapes") {
    Hamiltonian tfim = chain_tfim(4);
    CHECK(tfim.term_count() == 7);
    CHECK(tfim.degree() == 4);

    Hamiltonian grid = grid_zz(2, 2);
    CHECK(grid.term_count() == 4);
    CHECK(grid.degree() == 2);

    Hamiltonian heis = heisenberg_chain(3);
    CHECK(heis.term_count() == 6);

    Hamiltonian k1 = random_klocal(8, 4, 1, -0.5, 0.5, 3);
    CHECK(k1.locality() == 1);
}

TEST_CASE("duplicate terms are distinct indices and mutual neighbors") {
    std::vector<Term> terms;
    for (int rep = 0; rep < 2; ++rep) {
        Term t;
        t.coeff = rep == 0 ? 0.5 : -0.25;
        t.pauli = SignedPauli(PauliString::from_axes(3, {{0, Axis::Z}, {1, Axis::Z}}));
        terms.push_back(t);
    }
    Hamiltonian h(3, 2, std::move(terms));
    CHECK(h.term_count() == 2);
    CHECK(h.neighbors(0) == std::vector<int>{1});
    CHECK(h.neighbors(1) == std::vector<int>{0});
}

TEST_CASE("cluster-mode critical beta at degree 4") {
    Hamiltonian h = chain_tfim(4); // degree 4
    CHECK(h.critical_beta(BetaMode::Cluster) == doctest::Approx(1.0 / 400).epsilon(1e-12));
}
