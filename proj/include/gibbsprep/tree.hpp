#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

#include <Eigen/Dense>

#include "gibbsprep/cluster.hpp"
#include "gibbsprep/pinning.hpp"
#include "gibbsprep/stabilizer.hpp"

namespace gibbsprep {

// Chain parameters. Zero-valued budgets mean "use the default formula":
//   steps_per_epoch = ceil(c1 n^3 ln(n k_branch / epsilon))
//   max_epochs      = ceil(c2 n ln(1/delta))
// where ln(k_branch) comes from the per-step outcome-count bound
// (40 ln(n/tree_epsilon) (Delta+1))^{20 ln(n/tree_epsilon)}.
struct WalkParams {
    double epsilon = 0.1;      // TV target for the chain's leaf distribution
    double tree_epsilon = 0.1; // per-step series accuracy; sets t_max = ceil(10 ln(n/eps))
    double delta = 0.01;       // failure-probability budget
    double c1 = 4.0;
    double c2 = 8.0;
    double eta_ratio = 0.01;   // accuracy of partition estimates inside ratios
    long steps_per_epoch = 0;
    long max_epochs = 0;
};

int default_t_max(const Hamiltonian& h, double tree_epsilon);
long default_steps_per_epoch(const Hamiltonian& h, const WalkParams& p);
long default_max_epochs(const Hamiltonian& h, const WalkParams& p);

// Shared memo for restricted-Hamiltonian partition estimates, keyed by the
// unpinned site set. Values are deterministic, so concurrent writers agree.
class ClusterCache {
public:
    double log_ntr(const Hamiltonian& h, const Bits& s, double beta, double eta);

private:
    std::mutex mu_;
    std::unordered_map<Bits, double, BitsHash> memo_;
};

// A realized vertex of the weighted sample tree. Children are keyed by the
// full pin-step transcript, so re-drawing an already-seen outcome lands on
// the same node.
struct SampleTreeNode {
    PinState label;
    SampleTreeNode* parent = nullptr;
    std::map<std::vector<int>, std::unique_ptr<SampleTreeNode>> children;
    std::optional<double> r_hat;
    bool leaf = false;
    int depth = 0;
};

std::vector<int> pin_transcript_key(const PinTranscript& tr);

// Exact kappa/omega at a leaf: tr(sigma(config)). Contract error on internal nodes.
double leaf_ratio(const SampleTreeNode& node);

struct WalkStats {
    long steps = 0;
    long epochs_used = 0;
    long ratio_queries = 0;
    long nodes_created = 0;
    int leaf_depth = -1;
    bool success = false;
};

// Per-step telemetry: step index, depth, move in {'u','d','s'}, up-move ratio.
using StepTelemetry = std::function<void(long, int, char, double)>;

// One walk's realized subtree plus its ratio cache. Not thread-safe; run
// parallel walks on separate trees sharing a ClusterCache.
class SampleTree {
public:
    SampleTree(const Hamiltonian& h, double beta, WalkParams params,
               std::shared_ptr<ClusterCache> cache = nullptr);

    SampleTreeNode& root() { return *root_; }
    const Hamiltonian& hamiltonian() const { return h_; }
    const WalkParams& params() const { return params_; }

    // r_hat, computed on first use and cached: exact trace at leaves,
    // pinned-trace times partition estimate at internal nodes.
    double ratio(SampleTreeNode& node);
    // Internal-node estimate tr(Y_v) * exp(zhat(H^(S_v))); exposed for tests.
    double estimate_ratio(const SampleTreeNode& node);

    SampleTreeNode& sample_child(SampleTreeNode& node, Rng& rng);

    SampleTreeNode* run_walk(Rng& rng, WalkStats* stats = nullptr,
                             const StepTelemetry& telemetry = nullptr);

    long ratio_queries = 0;
    long nodes_created = 0;

private:
    const Hamiltonian& h_;
    double beta_;
    WalkParams params_;
    long steps_per_epoch_;
    long max_epochs_;
    std::shared_ptr<ClusterCache> cache_;
    std::unique_ptr<SampleTreeNode> root_;
};

// Gibbs-state sampler: tree random walk to a leaf, then stabilizer emission.
// The mixture over outputs is within epsilon of e^{-beta H}/tr(e^{-beta H})
// in trace distance; bottom (nullopt) occurs with probability <= delta.
class GibbsSampler {
public:
    GibbsSampler(const Hamiltonian& h, double beta, double epsilon, double delta,
                 bool unsafe_override = false);

    // Override the auto-computed chain budgets (kept public for tuning).
    WalkParams& params() { return params_; }

    std::optional<ProductState> sample(Rng& rng, WalkStats* stats = nullptr,
                                       const StepTelemetry& telemetry = nullptr);

private:
    const Hamiltonian& h_;
    double beta_;
    WalkParams params_;
    std::shared_ptr<ClusterCache> cache_;
};

std::optional<ProductState> sample_gibbs_state(const Hamiltonian& h, double beta, double epsilon,
                                               double delta, Rng& rng,
                                               bool unsafe_override = false);

// Full enumeration of the (finite-t_max) sample tree for small instances,
// with natural weights, cached ratios, and the chain's transition matrix.
struct EnumeratedTree {
    struct Node {
        PinState label;
        int parent = -1;
        double omega = 1.0; // natural weight: probability of reaching the node
        double r_hat = 0.0;
        bool leaf = false;
        std::vector<int> children;
    };
    std::vector<Node> nodes; // index 0 = root
};

EnumeratedTree enumerate_sample_tree(const Hamiltonian& h, double beta, int t_max,
                                     double eta_ratio, long max_nodes = 200000);

// Column-stochastic transition matrix of the tree walk on the enumerated
// tree: entry (u, v) is the probability of moving to u from v.
Eigen::MatrixXd tree_transition_matrix(const EnumeratedTree& tree);

} // namespace gibbsprep
