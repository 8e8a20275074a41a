#include "gibbsprep/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "gibbsprep/monomial.hpp"
#include "gibbsprep/pauli.hpp"

namespace gibbsprep {

Rational ursell(const std::vector<uint32_t>& adjacency) {
    int v = static_cast<int>(adjacency.size());
    if (v < 1 || v > 9) throw std::runtime_error("ursell: supports 1..9 vertices");
    const uint32_t full = (1u << v) - 1;

    // edge_free[mask]: the induced subgraph on mask has no edges
    std::vector<char> edge_free(full + 1, 1);
    for (uint32_t mask = 1; mask <= full; ++mask) {
        int lo = __builtin_ctz(mask);
        uint32_t rest = mask & (mask - 1);
        edge_free[mask] = edge_free[rest] && (adjacency[lo] & rest) == 0;
    }

    // t[mask] = sum over spanning connected edge subsets of G[mask] of (-1)^{|A|}.
    // Peeling off the component of the lowest vertex v0 gives
    //   [G[mask] edge-free] = sum over S with v0 in S of t[S] [G[mask \ S] edge-free],
    // which determines t[mask] from proper submasks.
    std::vector<long long> t(full + 1, 0);
    for (uint32_t mask = 1; mask <= full; ++mask) {
        uint32_t v0 = mask & ~(mask - 1);
        if (mask == v0) {
            t[mask] = 1;
            continue;
        }
        long long acc = edge_free[mask] ? 1 : 0;
        if (edge_free[mask & ~v0]) acc -= t[v0];
        uint32_t others = mask & ~v0;
        for (uint32_t sub = others; sub > 0; sub = (sub - 1) & others) {
            uint32_t s = sub | v0;
            if (s == mask) continue;
            if (edge_free[mask & ~s]) acc -= t[s];
        }
        t[mask] = acc;
    }

    long long fact = 1;
    for (int i = 2; i <= v; ++i) fact *= i;
    long long num = t[full];
    long long g = std::gcd(std::abs(num), fact);
    if (g == 0) g = 1;
    return Rational{num / g, fact / g};
}

double polymer_weight(const Hamiltonian& h, const Polymer& gamma, double beta, int w_max) {
    int w = gamma.size();
    if (w < 1) throw std::invalid_argument("polymer_weight: polymer must be nonempty");
    if (w > w_max)
        throw std::runtime_error("polymer_weight: multiset size exceeds the permutation cap");

    // The symmetric-group sum visits each distinct ordering gamma! times, which
    // cancels the gamma! in the weight's denominator; iterating distinct
    // orderings once leaves only the |gamma|! division.
    std::vector<int> perm = gamma.terms;
    std::complex<double> trace_sum = 0.0;
    do {
        PauliString prod = PauliString::identity(h.sites());
        for (int a : perm) prod = pauli_mul(prod, h.term(a).pauli.string());
        trace_sum += prod.normalized_trace();
    } while (std::next_permutation(perm.begin(), perm.end()));

    if (std::abs(trace_sum.imag()) > 1e-12 * std::max(1.0, std::abs(trace_sum.real())))
        throw std::logic_error("polymer_weight: permutation-symmetrized trace not real");

    double lambda_prod = 1.0;
    for (int a : gamma.terms) lambda_prod *= h.term(a).coeff;

    double size_fact = 1.0;
    for (int i = 2; i <= w; ++i) size_fact *= i;

    return std::pow(-beta, w) / size_fact * trace_sum.real() * lambda_prod;
}

namespace {

// Connected vertex sets of the dual graph with minimum vertex = root.
// Classic include/exclude branching on an expanding frontier: once a
// candidate's include-branch is explored it stays banned for the later
// branches at the same level, so each set is produced exactly once.
void connected_sets_from(const Hamiltonian& h, const Bits& allowed, int root, int max_size,
                         std::vector<int>& current, Bits& banned, std::vector<int>& frontier,
                         size_t frontier_begin,
                         const std::function<void(const std::vector<int>&)>& emit) {
    emit(current);
    if (static_cast<int>(current.size()) == max_size) return;
    size_t level_end = frontier.size();
    for (size_t fi = frontier_begin; fi < level_end; ++fi) {
        int cand = frontier[fi];
        if (banned.test(cand)) continue;
        banned.set(cand);
        current.push_back(cand);

        size_t frontier_len = frontier.size();
        for (int b : h.neighbors(cand)) {
            if (b <= root || !allowed.test(b) || banned.test(b)) continue;
            if (std::find(frontier.begin(), frontier.end(), b) == frontier.end())
                frontier.push_back(b);
        }
        connected_sets_from(h, allowed, root, max_size, current, banned, frontier, fi + 1, emit);
        frontier.resize(frontier_len);
        current.pop_back();
    }
    for (size_t fi = frontier_begin; fi < level_end; ++fi) banned.reset(frontier[fi]);
}

void multiplicity_splits(size_t vert_count, int total, size_t idx, std::vector<int>& mults,
                         const std::function<void()>& emit) {
    if (idx + 1 == vert_count) {
        mults[idx] = total;
        emit();
        return;
    }
    int reserve = static_cast<int>(vert_count - idx - 1); // at least one per remaining vertex
    for (int m = 1; m + reserve <= total; ++m) {
        mults[idx] = m;
        multiplicity_splits(vert_count, total - m, idx + 1, mults, emit);
    }
}

} // namespace

std::vector<Polymer> enumerate_polymers(const Hamiltonian& h, const Bits& allowed, int max_size) {
    std::vector<Polymer> out;
    std::vector<std::vector<int>> connected_sets;
    for (int root = 0; root < h.term_count(); ++root) {
        if (!allowed.test(root)) continue;
        std::vector<int> current = {root};
        Bits banned(h.term_count());
        banned.set(root);
        std::vector<int> frontier;
        for (int b : h.neighbors(root))
            if (b > root && allowed.test(b)) frontier.push_back(b);
        connected_sets_from(h, allowed, root, max_size, current, banned, frontier, 0,
                            [&](const std::vector<int>& set) { connected_sets.push_back(set); });
    }

    for (const std::vector<int>& set : connected_sets) {
        std::vector<int> verts = set;
        std::sort(verts.begin(), verts.end());
        for (int total = static_cast<int>(verts.size()); total <= max_size; ++total) {
            std::vector<int> mults(verts.size());
            multiplicity_splits(verts.size(), total, 0, mults, [&]() {
                Polymer p;
                for (size_t i = 0; i < verts.size(); ++i)
                    for (int r = 0; r < mults[i]; ++r) p.terms.push_back(verts[i]);
                out.push_back(std::move(p));
            });
        }
    }
    return out;
}

bool polymers_incompatible(const Hamiltonian& h, const Polymer& a, const Polymer& b) {
    for (int x : a.terms)
        for (int y : b.terms) {
            if (x == y) return true;
            const auto& adj = h.neighbors(x);
            if (std::binary_search(adj.begin(), adj.end(), y)) return true;
        }
    return false;
}

double cluster_beta_star(const Hamiltonian& h) {
    double d = std::max(h.degree(), 1);
    const double e = std::exp(1.0);
    return 1.0 / (e * (e + 1.0) * (1.0 + e * (d - 1.0)));
}

double polymer_count_bound(const Hamiltonian& h, int w) {
    double d = std::max(h.degree(), 1);
    const double e = std::exp(1.0);
    return e * std::pow(1.0 + e * (d - 1.0), w - 1);
}

void enumerate_clusters(const Hamiltonian& h, const std::vector<Polymer>& polymers, int d,
                        const ClusterVisitor& visit) {
    if (d < 1) throw std::invalid_argument("enumerate_clusters: d must be >= 1");

    std::vector<Bits> supports, nbhds;
    supports.reserve(polymers.size());
    nbhds.reserve(polymers.size());
    for (const Polymer& p : polymers) {
        Bits support(h.term_count()), nbhd(h.term_count());
        for (int a : p.terms) {
            support.set(a);
            nbhd.set(a);
            for (int b : h.neighbors(a)) nbhd.set(b);
        }
        supports.push_back(std::move(support));
        nbhds.push_back(std::move(nbhd));
    }

    ClusterTuple tuple;
    auto emit_if_connected = [&]() {
        int len = static_cast<int>(tuple.polymer_indices.size());
        tuple.incompatibility.assign(len, 0);
        for (int i = 0; i < len; ++i)
            for (int j = i + 1; j < len; ++j) {
                int pi = tuple.polymer_indices[i], pj = tuple.polymer_indices[j];
                if (pi == pj || nbhds[pi].intersects(supports[pj])) {
                    tuple.incompatibility[i] |= 1u << j;
                    tuple.incompatibility[j] |= 1u << i;
                }
            }
        uint32_t reached = 1;
        for (bool grew = true; grew;) {
            grew = false;
            for (int i = 0; i < len; ++i)
                if ((reached >> i & 1) && (tuple.incompatibility[i] & ~reached)) {
                    reached |= tuple.incompatibility[i];
                    grew = true;
                }
        }
        if (reached != (len >= 32 ? ~0u : (1u << len) - 1)) return;

        long len_fact = 1;
        for (int i = 2; i <= len; ++i) len_fact *= i;
        long mult_fact = 1;
        for (int i = 0; i < len;) {
            int j = i;
            while (j < len && tuple.polymer_indices[j] == tuple.polymer_indices[i]) ++j;
            for (int r = 2; r <= j - i; ++r) mult_fact *= r;
            i = j;
        }
        tuple.ordered_count = len_fact / mult_fact;
        visit(tuple);
    };

    std::function<void(int, int)> recurse = [&](int start, int total) {
        if (!tuple.polymer_indices.empty()) emit_if_connected();
        for (int i = start; i < static_cast<int>(polymers.size()); ++i) {
            int sz = polymers[i].size();
            if (total + sz > d) continue;
            tuple.polymer_indices.push_back(i);
            recurse(i, total + sz);
            tuple.polymer_indices.pop_back();
        }
    };
    recurse(0, 0);
}

void enumerate_clusters(const Hamiltonian& h, int d, const ClusterVisitor& visit) {
    enumerate_clusters(h, enumerate_polymers(h, all_terms_mask(h), d), d, visit);
}

ClusterSeriesResult cluster_log_ntr(const Hamiltonian& h, const Bits& active, double beta,
                                    double eta) {
    if (!(eta > 0.0 && eta < 1.0))
        throw std::invalid_argument("cluster_log_ntr: eta must be in (0, 1)");
    if (beta < 0.0) throw std::invalid_argument("cluster_log_ntr: beta must be >= 0");

    ClusterSeriesResult res;
    res.beta_star = cluster_beta_star(h);
    if (beta == 0.0 || active.none()) return res;

    double ratio = beta / res.beta_star;
    int k = static_cast<int>(
        std::floor(std::log(h.sites() / ((1.0 - ratio) * eta)) / std::log(1.0 / ratio)));
    if (k < 0) k = 0;
    if (k > kPolymerMaxSize) {
        k = kPolymerMaxSize;
        res.k_capped = true;
    }
    res.k_used = k;
    res.truncation_bound = h.sites() * std::pow(ratio, k + 1) / (1.0 - ratio);
    if (k == 0) return res;

    std::vector<Polymer> polymers = enumerate_polymers(h, active, k);
    std::vector<double> weights;
    weights.reserve(polymers.size());
    for (const Polymer& p : polymers) weights.push_back(polymer_weight(h, p, beta));

    // The ordered-tuple series regrouped over unordered clusters, each
    // weighted by its multinomial count of orderings.
    double sum = 0.0;
    long count = 0;
    enumerate_clusters(h, polymers, k, [&](const ClusterTuple& tuple) {
        Rational phi = ursell(tuple.incompatibility);
        double w = 1.0;
        for (int idx : tuple.polymer_indices) w *= weights[idx];
        sum += static_cast<double>(tuple.ordered_count) * phi.value() * w;
        ++count;
    });

    res.log_ntr = sum;
    res.cluster_count = count;
    return res;
}

LogZResult log_partition_estimate(const Hamiltonian& h, double beta, double eta) {
    double threshold = h.critical_beta(BetaMode::Cluster);
    if (!(beta >= 0.0 && beta < threshold))
        throw std::invalid_argument("log_partition_estimate: requires 0 <= beta < 1/(100 Delta)");
    LogZResult res;
    res.series = cluster_log_ntr(h, all_terms_mask(h), beta, eta);
    res.z_hat = h.sites() * std::log(2.0) + res.series.log_ntr;
    return res;
}

} // namespace gibbsprep
