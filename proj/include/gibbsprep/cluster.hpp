#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gibbsprep/hamiltonian.hpp"

namespace gibbsprep {

// Nonempty multiset of term indices whose support is connected on the dual
// interaction graph.
struct Polymer {
    std::vector<int> terms; // sorted ascending, with multiplicity
    int size() const { return static_cast<int>(terms.size()); }
};

// Permutation enumeration in polymer_weight caps the multiset size; 8! products
// per polymer is the accepted worst case.
inline constexpr int kPolymerMaxSize = 8;

// Exact value of the Ursell function as an integer ratio.
struct Rational {
    long long num = 0;
    long long den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// phi(G) = (1/|V|!) sum over spanning connected edge subsets of (-1)^{|A|}.
// Graph given as per-vertex neighbor bitmasks; at most 9 vertices.
Rational ursell(const std::vector<uint32_t>& adjacency);

// w_gamma = ((-beta)^{|g|} / (|g|! g!)) ntr(sum over permutations of the bare
// Pauli product) lambda^g. The permutation sum is Hermitian, so the trace is
// real; residual imaginary part must stay under 1e-12.
double polymer_weight(const Hamiltonian& h, const Polymer& gamma, double beta,
                      int w_max = kPolymerMaxSize);

// All polymers over the `allowed` term mask with size <= max_size, in a
// deterministic order.
std::vector<Polymer> enumerate_polymers(const Hamiltonian& h, const Bits& allowed, int max_size);

// Polymers gamma, gamma' are incompatible when their dual-graph distance is
// at most one.
bool polymers_incompatible(const Hamiltonian& h, const Polymer& a, const Polymer& b);

// An unordered multiset of polymers whose incompatibility graph is connected,
// standing in for ordered_count = len!/prod(multiplicity!) ordered tuples of
// the cluster series.
struct ClusterTuple {
    std::vector<int> polymer_indices; // non-decreasing, into the polymer list
    long ordered_count = 1;
    std::vector<uint32_t> incompatibility; // neighbor bitmask per position
};

using ClusterVisitor = std::function<void(const ClusterTuple&)>;

// Streams every cluster with total polymer size <= d over the given polymer
// list (as produced by enumerate_polymers with max_size >= d).
void enumerate_clusters(const Hamiltonian& h, const std::vector<Polymer>& polymers, int d,
                        const ClusterVisitor& visit);
void enumerate_clusters(const Hamiltonian& h, int d, const ClusterVisitor& visit);

struct ClusterSeriesResult {
    double log_ntr = 0.0;       // estimate of log ntr(e^{-beta H'})
    int k_used = 0;             // truncation order actually used
    long cluster_count = 0;     // connected cluster multisets that contributed
    bool k_capped = false;      // requested eta forced k past kPolymerMaxSize
    double truncation_bound = 0.0;
    double beta_star = 0.0;
};

// Truncated cluster series for the sub-Hamiltonian over `active`. The order
// k = floor(log(n/((1-beta/beta_*) eta)) / log(beta_*/beta)) makes the
// truncation error at most eta; beta_* = 1/(e(e+1)(1+e(Delta-1))).
ClusterSeriesResult cluster_log_ntr(const Hamiltonian& h, const Bits& active, double beta,
                                    double eta);

struct LogZResult {
    double z_hat = 0.0;
    ClusterSeriesResult series;
};

// Estimate of log tr(e^{-beta H}) within +-eta; requires beta < 1/(100 Delta)
// and 0 < eta < 1.
LogZResult log_partition_estimate(const Hamiltonian& h, double beta, double eta);

double cluster_beta_star(const Hamiltonian& h);
// e (1 + e(Delta-1))^{w-1}: cap on the number of polymers of size w through a
// fixed term.
double polymer_count_bound(const Hamiltonian& h, int w);

} // namespace gibbsprep
