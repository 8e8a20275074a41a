#include <doctest.h>

#include <map>

#include "gibbsprep/cluster.hpp"
#include "gibbsprep/models.hpp"
#include "gibbsprep/monomial.hpp"
#include "helpers.hpp"

using namespace gibbsprep;

namespace {

Hamiltonian single_term(double lambda) {
    std::vector<Term> terms(1);
    terms[0].coeff = lambda;
    terms[0].pauli = SignedPauli(PauliString::from_axes(2, {{0, Axis::Z}, {1, Axis::Z}}));
    return Hamiltonian(2, 2, std::move(terms));
}

// all multisets over [m] of size <= w whose support is connected on the dual graph
long brute_force_polymer_count(const Hamiltonian& h, int max_size) {
    long count = 0;
    std::vector<int> stack;
    std::function<void(int)> rec = [&](int lo) {
        if (!stack.empty()) {
            // connectivity of the support
            std::vector<int> verts = stack;
            std::sort(verts.begin(), verts.end());
            verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
            std::vector<char> seen(verts.size(), 0);
            std::vector<int> queue = {0};
            seen[0] = 1;
            size_t visited = 1;
            while (!queue.empty()) {
                int i = queue.back();
                queue.pop_back();
                for (size_t j = 0; j < verts.size(); ++j) {
                    if (seen[j]) continue;
                    const auto& adj = h.neighbors(verts[i]);
                    if (std::binary_search(adj.begin(), adj.end(), verts[j])) {
                        seen[j] = 1;
                        ++visited;
                        queue.push_back(static_cast<int>(j));
                    }
                }
            }
            if (visited == verts.size()) ++count;
        }
        if (static_cast<int>(stack.size()) == max_size) return;
        for (int a = lo; a < h.term_count(); ++a) {
            stack.push_back(a);
            rec(a);
            stack.pop_back();
        }
    };
    rec(0);
    return count;
}

} // namespace

TEST_CASE("ursell values on small graphs") {
    Rational single = ursell({0});
    CHECK(single.num == 1);
    CHECK(single.den == 1);

    Rational edge = ursell({0b10, 0b01});
    CHECK(edge.num == -1);
    CHECK(edge.den == 2);

    Rational two_isolated = ursell({0, 0});
    CHECK(two_isolated.num == 0);

    Rational triangle = ursell({0b110, 0b101, 0b011});
    CHECK(triangle.num == 1);
    CHECK(triangle.den == 3);

    // path on three vertices: only the full edge set spans and connects
    Rational path = ursell({0b010, 0b101, 0b010});
    CHECK(path.value() == doctest::Approx(1.0 / 6.0));

    CHECK_THROWS_AS(ursell(std::vector<uint32_t>(10, 0)), std::runtime_error);
}

TEST_CASE("ursell via brute-force edge-subset enumeration on random graphs") {
    Rng rng(47);
    for (int rep = 0; rep < 30; ++rep) {
        int v = 2 + rng.uniform_index(4); // 2..5 vertices
        std::vector<uint32_t> adj(v, 0);
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < v; ++i)
            for (int j = i + 1; j < v; ++j)
                if (rng.fair_coin()) {
                    adj[i] |= 1u << j;
                    adj[j] |= 1u << i;
                    edges.push_back({i, j});
                }
        long long acc = 0;
        for (uint32_t sub = 0; sub < (1u << edges.size()); ++sub) {
            // spanning connected check by union-find
            std::vector<int> parent(v);
            for (int i = 0; i < v; ++i) parent[i] = i;
            std::function<int(int)> find = [&](int x) {
                while (parent[x] != x) x = parent[x] = parent[parent[x]];
                return x;
            };
            int comps = v;
            for (size_t e = 0; e < edges.size(); ++e)
                if (sub >> e & 1) {
                    int a = find(edges[e].first), b = find(edges[e].second);
                    if (a != b) {
                        parent[a] = b;
                        --comps;
                    }
                }
            if (comps == 1) acc += (__builtin_popcount(sub) % 2) ? -1 : 1;
        }
        Rational phi = ursell(adj);
        long long fact = 1;
        for (int i = 2; i <= v; ++i) fact *= i;
        CHECK(phi.num * (fact / phi.den) == acc);
    }
}

TEST_CASE("polymer weights: singletons vanish, doubletons match the closed form") {
    Hamiltonian h = single_term(0.8);
    CHECK(polymer_weight(h, Polymer{{0}}, 0.3) == 0.0);

    // {a, a}: two permutations, each with trace 1, weight beta^2 lambda^2 / 2
    double w = polymer_weight(h, Polymer{{0, 0}}, 0.3);
    CHECK(w == doctest::Approx(0.3 * 0.3 * 0.64 / 2.0).epsilon(1e-12));

    CHECK_THROWS_AS(polymer_weight(h, Polymer{std::vector<int>(9, 0)}, 0.1),
                    std::runtime_error);
}

TEST_CASE("every polymer weight obeys |w| <= beta^size") {
    Hamiltonian h = chain_tfim(4, 0.9, -0.7);
    double beta = 0.01;
    for (const Polymer& p : enumerate_polymers(h, all_terms_mask(h), 4))
        CHECK(std::abs(polymer_weight(h, p, beta)) <= std::pow(beta, p.size()) * (1 + 1e-12));
}

TEST_CASE("polymer enumeration: size 1 gives one polymer per term") {
    Hamiltonian h = chain_tfim(4);
    auto polys = enumerate_polymers(h, all_terms_mask(h), 1);
    CHECK(static_cast<int>(polys.size()) == h.term_count());
}

TEST_CASE("single-term Hamiltonian: polymers are the powers of the term") {
    Hamiltonian h = single_term(1.0);
    auto polys = enumerate_polymers(h, all_terms_mask(h), 4);
    REQUIRE(polys.size() == 4);
    for (const Polymer& p : polys)
        for (int a : p.terms) CHECK(a == 0);
}

TEST_CASE("polymer counts match brute force") {
    Hamiltonian chain = grid_zz(1, 3);
    CHECK(static_cast<long>(enumerate_polymers(chain, all_terms_mask(chain), 2).size()) ==
          brute_force_polymer_count(chain, 2));

    Hamiltonian tfim = chain_tfim(3);
    for (int w = 1; w <= 4; ++w)
        CHECK(static_cast<long>(enumerate_polymers(tfim, all_terms_mask(tfim), w).size()) ==
              brute_force_polymer_count(tfim, w));

    Hamiltonian rnd = random_klocal(5, 6, 2, -1.0, 1.0, 900);
    CHECK(static_cast<long>(enumerate_polymers(rnd, all_terms_mask(rnd), 3).size()) ==
          brute_force_polymer_count(rnd, 3));

    Hamiltonian dense3 = random_klocal(6, 8, 3, -1.0, 1.0, 902);
    CHECK(static_cast<long>(enumerate_polymers(dense3, all_terms_mask(dense3), 3).size()) ==
          brute_force_polymer_count(dense3, 3));
}

TEST_CASE("no polymer is enumerated twice") {
    Hamiltonian h = chain_tfim(3);
    auto polys = enumerate_polymers(h, all_terms_mask(h), 4);
    std::map<std::vector<int>, int> seen;
    for (const Polymer& p : polys) seen[p.terms] += 1;
    for (const auto& [terms, count] : seen) CHECK(count == 1);
}

TEST_CASE("rooted polymer counts respect the e(1+e(Delta-1))^{w-1} bound") {
    for (const Hamiltonian& h :
         {chain_tfim(3), grid_zz(2, 2), random_klocal(5, 6, 2, -1.0, 1.0, 901)}) {
        auto polys = enumerate_polymers(h, all_terms_mask(h), 6);
        for (int a = 0; a < h.term_count(); ++a)
            for (int w = 1; w <= 6; ++w) {
                long rooted = 0;
                for (const Polymer& p : polys)
                    if (p.size() == w &&
                        std::find(p.terms.begin(), p.terms.end(), a) != p.terms.end())
                        ++rooted;
                CHECK(static_cast<double>(rooted) <= polymer_count_bound(h, w));
            }
    }
}

TEST_CASE("Kotecky-Preiss sum over incompatible polymers stays below one") {
    for (const Hamiltonian& h : {grid_zz(1, 4), chain_tfim(3)}) {
        double beta_star = cluster_beta_star(h);
        double beta = beta_star / 2.0;
        const int w_enum = 6;
        auto polys = enumerate_polymers(h, all_terms_mask(h), w_enum);
        const double e = std::exp(1.0);
        for (int a = 0; a < h.term_count(); ++a) {
            double sum = 0.0;
            for (const Polymer& p : polys) {
                bool incompatible = false;
                for (int b : p.terms) {
                    const auto& adj = h.neighbors(b);
                    if (b == a || std::binary_search(adj.begin(), adj.end(), a)) {
                        incompatible = true;
                        break;
                    }
                }
                if (incompatible)
                    sum += std::abs(polymer_weight(h, p, beta)) *
                           std::pow(beta_star / beta, p.size()) * std::exp(p.size());
            }
            // geometric tail for sizes above w_enum
            double d = std::max(h.degree(), 1);
            double tail = 0.0;
            for (int w = w_enum + 1; w <= 200; ++w)
                tail += (h.degree() + 1) * e * std::pow(1.0 + e * (d - 1.0), w - 1) *
                        std::pow(e * beta_star, w);
            CHECK(sum + tail <= 1.0);
        }
    }
}

TEST_CASE("log-partition estimate: zero-term Hamiltonian") {
    Hamiltonian h(4, 1, {});
    LogZResult res = log_partition_estimate(h, 0.005, 0.01);
    CHECK(res.z_hat == doctest::Approx(4 * std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("log-partition estimate: single term matches log cosh") {
    Hamiltonian h = single_term(1.0);
    double beta = 0.008;
    LogZResult res = log_partition_estimate(h, beta, 0.001);
    double exact = 2 * std::log(2.0) + std::log(std::cosh(beta));
    CHECK(std::abs(res.z_hat - exact) <= res.series.truncation_bound + 1e-12);
    CHECK(std::abs(res.z_hat - exact) <= 0.001);
}

TEST_CASE("log-partition estimate matches dense diagonalization within eta") {
    for (uint64_t seed = 0; seed < 3; ++seed) {
        Hamiltonian h = random_klocal_bounded_degree(5, 6, 2, 3, 950 + seed);
        double beta = 1.0 / (200.0 * std::max(h.degree(), 1));
        for (double eta : {0.1, 0.01}) {
            LogZResult res = log_partition_estimate(h, beta, eta);
            Eigen::SelfAdjointEigenSolver<DenseOp> es(hamiltonian_to_dense(h),
                                                      Eigen::EigenvaluesOnly);
            double exact = std::log((-beta * es.eigenvalues().array()).exp().sum());
            CHECK(std::abs(res.z_hat - exact) <= eta);
        }
    }
}

TEST_CASE("truncation order grows as eta shrinks") {
    Hamiltonian h = chain_tfim(6);
    double beta = 1.0 / (200.0 * h.degree());
    LogZResult coarse = log_partition_estimate(h, beta, 0.1);
    LogZResult fine = log_partition_estimate(h, beta, 0.01);
    CHECK(coarse.series.k_used <= fine.series.k_used);
}

TEST_CASE("log-partition estimate rejects beta at or above 1/(100 Delta)") {
    Hamiltonian h = chain_tfim(4);
    CHECK_THROWS_AS(log_partition_estimate(h, 1.0 / (100.0 * h.degree()), 0.01),
                    std::invalid_argument);
    CHECK_THROWS_AS(log_partition_estimate(h, 0.004, 1.5), std::invalid_argument);
}

TEST_CASE("cluster enumeration: d = 1 yields exactly the singleton polymers") {
    Hamiltonian h = chain_tfim(4);
    long count = 0;
    enumerate_clusters(h, 1, [&](const ClusterTuple& t) {
        ++count;
        CHECK(t.polymer_indices.size() == 1);
        CHECK(t.ordered_count == 1);
    });
    CHECK(count == h.term_count());
}

TEST_CASE("cluster enumeration: single-term Hamiltonian, d = 4") {
    std::vector<Term> terms(1);
    terms[0].coeff = 1.0;
    terms[0].pauli = SignedPauli(PauliString::from_axes(2, {{0, Axis::Z}, {1, Axis::Z}}));
    Hamiltonian h(2, 2, std::move(terms));

    auto polys = enumerate_polymers(h, all_terms_mask(h), 4);
    REQUIRE(polys.size() == 4); // {a}, {aa}, {aaa}, {aaaa}

    // every multiset of these polymers is self-incompatible, hence connected;
    // multisets with total size <= 4: 1 + 2 + 3 + 5
    long count = 0;
    enumerate_clusters(h, polys, 4, [&](const ClusterTuple&) { ++count; });
    CHECK(count == 11);
}

TEST_CASE("cluster enumeration: two-term chain, d = 2, matches hand count") {
    Hamiltonian h = grid_zz(1, 3); // terms Z0Z1, Z1Z2 sharing site 1
    // polymers of size <= 2: {0}, {1}, {00}, {01}, {11}; the two singletons are
    // adjacent, so all three singleton pairs are connected clusters
    long singles = 0, pairs = 0;
    enumerate_clusters(h, 2, [&](const ClusterTuple& t) {
        if (t.polymer_indices.size() == 1) ++singles;
        else ++pairs;
    });
    CHECK(singles == 5);
    CHECK(pairs == 3);
}

TEST_CASE("cluster multinomial counts") {
    std::vector<Term> terms(1);
    terms[0].coeff = 1.0;
    terms[0].pauli = SignedPauli(PauliString::single(1, 0, Axis::X));
    Hamiltonian h(1, 1, std::move(terms));
    auto polys = enumerate_polymers(h, all_terms_mask(h), 3);
    bool saw_triple = false, saw_mixed = false;
    enumerate_clusters(h, polys, 3, [&](const ClusterTuple& t) {
        if (t.polymer_indices == std::vector<int>{0, 0, 0}) {
            saw_triple = true;
            CHECK(t.ordered_count == 1); // identical polymers: one ordering class
        }
        if (t.polymer_indices == std::vector<int>{0, 1}) {
            saw_mixed = true;
            CHECK(t.ordered_count == 2);
        }
    });
    CHECK(saw_triple);
    CHECK(saw_mixed);
}
