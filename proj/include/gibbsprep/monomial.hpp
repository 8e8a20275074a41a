#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "gibbsprep/dense.hpp"
#include "gibbsprep/hamiltonian.hpp"
#include "gibbsprep/rng.hpp"

namespace gibbsprep {

// Scalar c and ordered term list (b_1, ..., b_t): the pair represents the
// estimator I + c H_{b_1}...H_{b_t} of a truncated propagator series, or
// c H_{b_1}...H_{b_t} alone for a single series coefficient f_k.
struct MonomialSample {
    double coeff = 0.0;
    std::vector<int> terms;
    int degree() const { return static_cast<int>(terms.size()); }
};

nlohmann::json monomial_to_json(const MonomialSample& s);

// One random decision of the f_k sampler. heads: pick `term` from the closed
// neighborhood of the current list and prepend or append; tails: pick `term`
// from Q and append.
struct FkStep {
    bool heads = false;
    int term = 0;
    bool prepend = false;
};

using FkTranscript = std::vector<FkStep>;

// Degree draw plus the f_k decisions; the full randomness of one propagator
// sample, sufficient to replay it deterministically.
struct PropTranscript {
    int t = 0;
    FkTranscript steps;
};

Bits all_terms_mask(const Hamiltonian& h);

// Unbiased estimator of f_k(H', H'^(Q)) where H' is the sub-Hamiltonian over
// `active`: E[coeff * H_{b_1}...H_{b_k}] = f_k. Q must be contained in
// `active` and nonempty when k >= 1.
MonomialSample sample_f_k(const Hamiltonian& h, const Bits& active, const TermSet& q, int k,
                          Rng& rng, FkTranscript* transcript_out = nullptr);
MonomialSample sample_f_k(const Hamiltonian& h, const TermSet& q, int k, Rng& rng);

// Unbiased estimator of the truncated propagator series:
// E[I + coeff * E] = T_{t_max, beta}(H', H'^(Q)). Degree t is drawn with
// P(t) = 2^-t (t in [1, t_max]) and leftover mass 2^-t_max on t = 0, which
// yields coeff = 0. t_max = nullopt draws t geometrically with no truncation.
MonomialSample sample_propagator(const Hamiltonian& h, const Bits& active, const TermSet& q,
                                 double beta, std::optional<int> t_max, Rng& rng,
                                 PropTranscript* transcript_out = nullptr);
MonomialSample sample_propagator(const Hamiltonian& h, const TermSet& q, double beta,
                                 std::optional<int> t_max, Rng& rng);

// Deterministic replay of a recorded transcript.
MonomialSample fk_apply(const Hamiltonian& h, const Bits& active, const TermSet& q,
                        const FkTranscript& steps);
MonomialSample prop_apply(const Hamiltonian& h, const Bits& active, const TermSet& q, double beta,
                          const PropTranscript& tr);

double fk_transcript_probability(const Hamiltonian& h, const Bits& active, const TermSet& q,
                                 const FkTranscript& steps);
double prop_transcript_probability(const Hamiltonian& h, const Bits& active, const TermSet& q,
                                   std::optional<int> t_max, const PropTranscript& tr);

// Exhaustive branch enumeration; probabilities over each call sum to 1.
// Throws when the branch tree exceeds max_branches.
using FkVisitor = std::function<void(const FkTranscript&, double prob, const MonomialSample&)>;
void enumerate_f_k(const Hamiltonian& h, const Bits& active, const TermSet& q, int k,
                   const FkVisitor& visit, long max_branches = 10'000'000);

using PropVisitor = std::function<void(const PropTranscript&, double prob, const MonomialSample&)>;
void enumerate_propagator(const Hamiltonian& h, const Bits& active, const TermSet& q, double beta,
                          int t_max, const PropVisitor& visit, long max_branches = 10'000'000);

// Every connected component of {b_1,...,b_t} on the dual graph must contain
// an element of Q.
bool terms_in_q_closure(const Hamiltonian& h, const TermSet& q, const std::vector<int>& terms);

// Dense evaluation of T_{t_max, beta}(H', H'^(Q)) by iterating the recurrence
// f_{t+1} = -[H', f_t] - f_t H'^(Q). Test oracle; n <= 12.
DenseOp truncated_series_dense(const Hamiltonian& h, const Bits& active, const TermSet& q,
                               double beta, int t_max);
DenseOp truncated_series_dense(const Hamiltonian& h, const TermSet& q, double beta, int t_max);

// Dense f_k via the same recurrence.
DenseOp f_k_dense(const Hamiltonian& h, const Bits& active, const TermSet& q, int k);

} // namespace gibbsprep
