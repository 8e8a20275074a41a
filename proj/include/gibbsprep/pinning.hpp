#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gibbsprep/dense.hpp"
#include "gibbsprep/monomial.hpp"

namespace gibbsprep {

// A Hermitian monomial of Hamiltonian terms, eagerly reduced. For Pauli
// terms the multiply-and-symmetrize construction always evaluates to zero or
// +-(product of lambdas) times a bare Pauli string, so the reduced `value`
// is lossless; the construction history survives as (degree, term_multiset,
// formal_support), which feed the potential bound and disjointness checks.
struct HermitianMonomial {
    std::optional<ScaledPauli> value; // nullopt = the zero operator
    int degree = 0;
    std::vector<int> term_multiset; // sorted ascending, with multiplicity
    Bits formal_support;            // union of supports of the associated terms

    static HermitianMonomial identity(int n);
    bool is_zero() const { return !value.has_value(); }
};

struct ConfigBlock {
    double c = 0.0;
    HermitianMonomial x;
};

// Disjoint-support blocks (c_i, X_i); sigma(config) is I + c_i X_i on each
// block's formal support and identity elsewhere.
struct Configuration {
    std::vector<ConfigBlock> blocks;
};

// Walking state of the pinning loop over a fixed Hamiltonian.
struct PinState {
    Bits s; // unpinned sites
    Configuration config;
    double beta = 0.0;
    std::optional<int> t_max; // nullopt = untruncated series (eps = 0)
    double gamma = 0.0;       // 3 / (5 K)
};

PinState initial_pin_state(const Hamiltonian& h, double beta, std::optional<int> t_max);

// Full randomness of one pinning step; everything else is deterministic.
struct PinTranscript {
    PropTranscript sample1;
    PropTranscript sample2;
    int xi = 0; // in {0, ..., 6}
};

// Deterministic preamble of a step on `state`: the pinned term a* (smallest
// index in E^(S) neighboring the last block, else smallest in E^(S) with a
// fresh block), the restricted term mask, and Q = E_(supp a*) cap E^(S).
struct PinContext {
    int a_star = -1;
    bool fresh_block = false;
    Bits active; // mask over terms: E^(S)
    TermSet q;
};

PinContext prepare_pin(const Hamiltonian& h, const PinState& state);

PinState pin_step_apply(const Hamiltonian& h, const PinState& state, const PinTranscript& tr);
PinState pin_step(const Hamiltonian& h, const PinState& state, Rng& rng,
                  PinTranscript* transcript_out = nullptr);

double pin_transcript_probability(const Hamiltonian& h, const PinState& state,
                                  const PinTranscript& tr);

// Exhaustive enumeration of one step's outcomes; requires finite t_max.
using PinVisitor = std::function<void(const PinTranscript&, double prob, const PinState&)>;
void enumerate_pin_step(const Hamiltonian& h, const PinState& state, const PinVisitor& visit,
                        long max_branches = 10'000'000);

// beta_pot = 1/(50 (Delta+1) K): the threshold under which the per-block
// potential bound |c| <= (1-gamma)^{|S cap supp|} (beta/beta_pot)^t holds.
double potential_beta(const Hamiltonian& h);
bool potential_bound_holds(const Hamiltonian& h, const PinState& state, double slack = 1e-9);
// Blocks before the last must not neighbor E^(S).
bool config_neighbor_invariant_holds(const Hamiltonian& h, const PinState& state);

// Iterates pinning with the untruncated series until E^(S) is empty.
// E[sigma(config)] over the run's randomness equals e^{-beta H}.
// Rejects beta > 1/(100 Delta K) unless unsafe_override.
Configuration run_separability(const Hamiltonian& h, double beta, Rng& rng,
                               bool unsafe_override = false);

// sigma(config) as a dense matrix; n <= 12. Throws on overlapping supports.
DenseOp evaluate_config_dense(const Configuration& config, int n);

// Exact trace of sigma(config) without dense materialization:
// 2^n * prod over blocks (1 + c r [P identity]).
double config_trace(const Configuration& config, int n);

nlohmann::json config_to_json(const Configuration& config);
Configuration config_from_json(const Hamiltonian& h, const nlohmann::json& j);

} // namespace gibbsprep
