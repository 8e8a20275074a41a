#include "gibbsprep/tree.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace gibbsprep {

int default_t_max(const Hamiltonian& h, double tree_epsilon) {
    return static_cast<int>(std::ceil(10.0 * std::log(h.sites() / tree_epsilon)));
}

long default_steps_per_epoch(const Hamiltonian& h, const WalkParams& p) {
    double n = h.sites();
    double l = std::log(n / p.tree_epsilon);
    double log_k = 20.0 * l * std::log(40.0 * l * (h.degree() + 1));
    return static_cast<long>(std::ceil(p.c1 * n * n * n * (std::log(n) + log_k + std::log(1.0 / p.epsilon))));
}

long default_max_epochs(const Hamiltonian& h, const WalkParams& p) {
    return static_cast<long>(std::ceil(p.c2 * h.sites() * std::log(1.0 / p.delta)));
}

double ClusterCache::log_ntr(const Hamiltonian& h, const Bits& s, double beta, double eta) {
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = memo_.find(s);
        if (it != memo_.end()) return it->second;
    }
    TermSet restricted = h.restricted_terms(s);
    Bits active(h.term_count());
    for (int a : restricted) active.set(a);
    double value = cluster_log_ntr(h, active, beta, eta).log_ntr;
    std::lock_guard<std::mutex> lock(mu_);
    memo_[s] = value; // idempotent: concurrent writers compute the same value
    return value;
}

std::vector<int> pin_transcript_key(const PinTranscript& tr) {
    std::vector<int> key;
    auto push_prop = [&](const PropTranscript& p) {
        key.push_back(p.t);
        for (const FkStep& s : p.steps) {
            key.push_back(s.heads ? 1 : 0);
            key.push_back(s.term);
            key.push_back(s.prepend ? 1 : 0);
        }
        key.push_back(-1);
    };
    push_prop(tr.sample1);
    push_prop(tr.sample2);
    key.push_back(tr.xi);
    return key;
}

double leaf_ratio(const SampleTreeNode& node) {
    if (!node.leaf) throw std::logic_error("leaf_ratio: called on an internal node");
    return config_trace(node.label.config, node.label.s.size());
}

namespace {

bool node_is_leaf(const Hamiltonian& h, const PinState& label) {
    return h.restricted_terms(label.s).empty();
}

// The last block stays "active" while the next pin step would extend it
// (prepare_pin would not open a fresh block); everything else is pinned and
// contributes its trace factor exactly.
double pinned_trace(const Hamiltonian& h, const PinState& label) {
    const auto& blocks = label.config.blocks;
    size_t active_count = (!blocks.empty() && !prepare_pin(h, label).fresh_block) ? 1 : 0;
    double tr = std::pow(2.0, h.sites());
    for (size_t i = 0; i + active_count < blocks.size(); ++i) {
        const ConfigBlock& b = blocks[i];
        if (b.x.is_zero()) continue;
        if (b.x.value->pauli.is_identity_body()) tr *= 1.0 + b.c * b.x.value->coeff;
    }
    return tr;
}

} // namespace

SampleTree::SampleTree(const Hamiltonian& h, double beta, WalkParams params,
                       std::shared_ptr<ClusterCache> cache)
    : h_(h), beta_(beta), params_(params), cache_(std::move(cache)) {
    if (!cache_) cache_ = std::make_shared<ClusterCache>();
    steps_per_epoch_ =
        params_.steps_per_epoch > 0 ? params_.steps_per_epoch : default_steps_per_epoch(h, params_);
    max_epochs_ = params_.max_epochs > 0 ? params_.max_epochs : default_max_epochs(h, params_);
    root_ = std::make_unique<SampleTreeNode>();
    root_->label = initial_pin_state(h, beta, default_t_max(h, params_.tree_epsilon));
    root_->leaf = node_is_leaf(h, root_->label);
}

double SampleTree::estimate_ratio(const SampleTreeNode& node) {
    if (node.leaf) throw std::logic_error("estimate_ratio: called on a leaf");
    double zhat = cache_->log_ntr(h_, node.label.s, beta_, params_.eta_ratio);
    return pinned_trace(h_, node.label) * std::exp(zhat);
}

double SampleTree::ratio(SampleTreeNode& node) {
    if (!node.r_hat) {
        node.r_hat = node.leaf ? leaf_ratio(node) : estimate_ratio(node);
        ++ratio_queries;
    }
    return *node.r_hat;
}

SampleTreeNode& SampleTree::sample_child(SampleTreeNode& node, Rng& rng) {
    if (node.leaf) throw std::logic_error("sample_child: called on a leaf");
    PinTranscript tr;
    PinState next = pin_step(h_, node.label, rng, &tr);
    std::vector<int> key = pin_transcript_key(tr);
    auto it = node.children.find(key);
    if (it != node.children.end()) return *it->second;

    auto child = std::make_unique<SampleTreeNode>();
    child->label = std::move(next);
    child->parent = &node;
    child->depth = node.depth + 1;
    child->leaf = node_is_leaf(h_, child->label);
    ++nodes_created;
    SampleTreeNode& ref = *child;
    node.children.emplace(std::move(key), std::move(child));
    return ref;
}

SampleTreeNode* SampleTree::run_walk(Rng& rng, WalkStats* stats, const StepTelemetry& telemetry) {
    WalkStats local;
    SampleTreeNode* node = root_.get();
    for (long epoch = 0; epoch < max_epochs_; ++epoch) {
        for (long step = 0; step < steps_per_epoch_; ++step) {
            ++local.steps;
            double up_ratio = 0.0;
            if (node->parent) {
                up_ratio = ratio(*node->parent) / ratio(*node);
                if (up_ratio > 10.0 * (1.0 + 1e-9))
                    throw std::logic_error("run_walk: cached ratio r_u/r_v exceeds 10");
            }
            double u = rng.uniform_double();
            char move = 's';
            if (u < 0.01 * up_ratio) {
                node = node->parent;
                move = 'u';
            } else if (u < 0.01 * up_ratio + 0.01) {
                if (!node->leaf) {
                    node = &sample_child(*node, rng);
                    move = 'd';
                }
            }
            if (telemetry) telemetry(local.steps, node->depth, move, up_ratio);
        }
        local.epochs_used = epoch + 1;
        if (node->leaf) {
            local.success = true;
            local.leaf_depth = node->depth;
            local.ratio_queries = ratio_queries;
            local.nodes_created = nodes_created;
            if (stats) *stats = local;
            return node;
        }
    }
    local.ratio_queries = ratio_queries;
    local.nodes_created = nodes_created;
    if (stats) *stats = local;
    return nullptr;
}

GibbsSampler::GibbsSampler(const Hamiltonian& h, double beta, double epsilon, double delta,
                           bool unsafe_override)
    : h_(h), beta_(beta), cache_(std::make_shared<ClusterCache>()) {
    if (beta > h.critical_beta(BetaMode::Sampling) && !unsafe_override)
        throw std::invalid_argument(
            "GibbsSampler: beta exceeds 1/(200 Delta K); pass the unsafe override to force");
    params_.tree_epsilon = epsilon;
    params_.epsilon = epsilon / 4.0; // chain TV budget per the failure accounting
    params_.delta = delta;
}

std::optional<ProductState> GibbsSampler::sample(Rng& rng, WalkStats* stats,
                                                 const StepTelemetry& telemetry) {
    SampleTree tree(h_, beta_, params_, cache_);
    SampleTreeNode* leaf = tree.run_walk(rng, stats, telemetry);
    if (!leaf) return std::nullopt;
    return sample_state(leaf->label.config, h_.sites(), rng);
}

std::optional<ProductState> sample_gibbs_state(const Hamiltonian& h, double beta, double epsilon,
                                               double delta, Rng& rng, bool unsafe_override) {
    GibbsSampler sampler(h, beta, epsilon, delta, unsafe_override);
    return sampler.sample(rng);
}

EnumeratedTree enumerate_sample_tree(const Hamiltonian& h, double beta, int t_max,
                                     double eta_ratio, long max_nodes) {
    EnumeratedTree tree;
    ClusterCache cache;

    EnumeratedTree::Node root;
    root.label = initial_pin_state(h, beta, t_max);
    root.leaf = node_is_leaf(h, root.label);
    tree.nodes.push_back(std::move(root));

    std::deque<int> queue = {0};
    while (!queue.empty()) {
        int idx = queue.front();
        queue.pop_front();
        // resolve the ratio with the same rule the walk uses
        {
            EnumeratedTree::Node& node = tree.nodes[idx];
            if (node.leaf) {
                node.r_hat = config_trace(node.label.config, h.sites());
                continue;
            }
            node.r_hat = pinned_trace(h, node.label) *
                         std::exp(cache.log_ntr(h, node.label.s, beta, eta_ratio));
        }
        PinState parent_label = tree.nodes[idx].label;
        enumerate_pin_step(h, parent_label, [&](const PinTranscript&, double prob,
                                                const PinState& out) {
            if (static_cast<long>(tree.nodes.size()) >= max_nodes)
                throw std::runtime_error("enumerate_sample_tree: node budget exceeded");
            EnumeratedTree::Node child;
            child.label = out;
            child.parent = idx;
            child.omega = tree.nodes[idx].omega * prob;
            child.leaf = node_is_leaf(h, child.label);
            tree.nodes[idx].children.push_back(static_cast<int>(tree.nodes.size()));
            queue.push_back(static_cast<int>(tree.nodes.size()));
            tree.nodes.push_back(std::move(child));
        });
    }
    return tree;
}

Eigen::MatrixXd tree_transition_matrix(const EnumeratedTree& tree) {
    const int n = static_cast<int>(tree.nodes.size());
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (int v = 0; v < n; ++v) {
        const auto& node = tree.nodes[v];
        double total = 0.0;
        if (node.parent >= 0) {
            double up = 0.01 * tree.nodes[node.parent].r_hat / node.r_hat;
            p(node.parent, v) = up;
            total += up;
        }
        if (!node.leaf) {
            for (int c : node.children) {
                double down = 0.01 * tree.nodes[c].omega / node.omega;
                p(c, v) = down;
                total += down;
            }
        }
        p(v, v) = 1.0 - total;
    }
    return p;
}

} // namespace gibbsprep
