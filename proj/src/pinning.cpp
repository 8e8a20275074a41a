#include "gibbsprep/pinning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace gibbsprep {

HermitianMonomial HermitianMonomial::identity(int n) {
    HermitianMonomial m;
    m.value = ScaledPauli{1.0, PauliString::identity(n)};
    m.degree = 0;
    m.formal_support = Bits(n);
    return m;
}

PinState initial_pin_state(const Hamiltonian& h, double beta, std::optional<int> t_max) {
    PinState st;
    st.s = Bits::all_set(h.sites());
    st.beta = beta;
    st.t_max = t_max;
    st.gamma = 3.0 / (5.0 * h.locality());
    return st;
}

double potential_beta(const Hamiltonian& h) {
    return 1.0 / (50.0 * (h.degree() + 1) * h.locality());
}

PinContext prepare_pin(const Hamiltonian& h, const PinState& state) {
    PinContext ctx;
    TermSet restricted = h.restricted_terms(state.s);
    if (restricted.empty())
        throw std::invalid_argument("pin_step: E^(S) is empty");
    ctx.active = Bits(h.term_count());
    for (int a : restricted) ctx.active.set(a);

    // Smallest restricted term in the closed neighborhood of the last block's
    // term multiset; changing this rule changes the sample tree, so it must
    // stay deterministic.
    if (!state.config.blocks.empty()) {
        Bits neighborhood(h.term_count());
        for (int a : state.config.blocks.back().x.term_multiset) {
            neighborhood.set(a);
            for (int b : h.neighbors(a)) neighborhood.set(b);
        }
        for (int a : restricted)
            if (neighborhood.test(a)) {
                ctx.a_star = a;
                break;
            }
    }
    if (ctx.a_star < 0) {
        ctx.fresh_block = true;
        ctx.a_star = restricted.front();
    }

    const Bits& pin_supp = h.term_support(ctx.a_star);
    for (int a : restricted)
        if (h.term_support(a).intersects(pin_supp)) ctx.q.push_back(a);
    return ctx;
}

namespace {

struct EvaluatedSample {
    double b = 0.0;            // scalar coefficient from the propagator sampler
    ScaledPauli product;       // prod lambda, prod of bare Pauli strings, in order
    int t = 0;
    std::vector<int> terms;    // as sampled, order preserved
    Bits support;
};

EvaluatedSample evaluate_sample(const Hamiltonian& h, const MonomialSample& m) {
    EvaluatedSample e;
    e.b = m.coeff;
    e.t = m.degree();
    e.terms = m.terms;
    e.support = Bits(h.sites());
    e.product.coeff = 1.0;
    e.product.pauli = PauliString::identity(h.sites());
    for (int a : m.terms) {
        e.product.coeff *= h.term(a).coeff;
        e.product.pauli = pauli_mul(e.product.pauli, h.term(a).pauli.string());
        e.support |= h.term_support(a);
    }
    return e;
}

std::vector<int> merged_multiset(std::initializer_list<const std::vector<int>*> lists) {
    std::vector<int> out;
    for (const auto* l : lists) out.insert(out.end(), l->begin(), l->end());
    std::sort(out.begin(), out.end());
    return out;
}

// (M + M^dagger)/2 for M = alpha * phased Pauli, with bookkeeping attached.
HermitianMonomial symmetrized(double alpha, const PauliString& pauli, int degree,
                              std::vector<int> multiset, Bits support) {
    HermitianMonomial m;
    m.value = hermitian_part(alpha, pauli);
    m.degree = degree;
    m.term_multiset = std::move(multiset);
    m.formal_support = std::move(support);
    return m;
}

} // namespace

PinState pin_step_apply(const Hamiltonian& h, const PinState& state, const PinTranscript& tr) {
    PinContext ctx = prepare_pin(h, state);

    PinState out = state;
    if (ctx.fresh_block)
        out.config.blocks.push_back(ConfigBlock{0.0, HermitianMonomial::identity(h.sites())});

    EvaluatedSample e1 =
        evaluate_sample(h, prop_apply(h, ctx.active, ctx.q, state.beta / 2.0, tr.sample1));
    EvaluatedSample e2 =
        evaluate_sample(h, prop_apply(h, ctx.active, ctx.q, state.beta / 2.0, tr.sample2));

    ConfigBlock& block = out.config.blocks.back();
    const double c = block.c;
    const HermitianMonomial x = block.x;
    const double g = state.gamma;

    // The last block is replaced according to the drawn case; the expectation
    // over xi and the two samples reconstructs
    //   T^dagger (I + cX) T  with  T = T_{t_max, beta/2}(H^(S), Q).
    const bool x_zero = x.is_zero();
    const double xr = x_zero ? 0.0 : x.value->coeff;
    const PauliString xp = x_zero ? PauliString::identity(h.sites()) : x.value->pauli;

    switch (tr.xi) {
        case 0:
            block.c = c / (1.0 - g);
            break;
        case 1:
        case 2: {
            const EvaluatedSample& e = (tr.xi == 1) ? e1 : e2;
            block.c = 6.0 * e.b / g;
            block.x = symmetrized(e.product.coeff, e.product.pauli, e.t,
                                  merged_multiset({&e.terms}), e.support);
            break;
        }
        case 3:
        case 4: {
            // (E^dagger X + X E)/2, i.e. the Hermitian part of M = X E
            const EvaluatedSample& e = (tr.xi == 3) ? e1 : e2;
            block.c = 6.0 * c * e.b / g;
            double alpha = x_zero ? 0.0 : xr * e.product.coeff;
            block.x = symmetrized(alpha, pauli_mul(xp, e.product.pauli), x.degree + e.t,
                                  merged_multiset({&x.term_multiset, &e.terms}),
                                  x.formal_support | e.support);
            break;
        }
        case 5: {
            // Hermitian part of M = E2^dagger E1
            block.c = 6.0 * e1.b * e2.b / g;
            block.x = symmetrized(e1.product.coeff * e2.product.coeff,
                                  pauli_mul(e2.product.pauli.adjoint(), e1.product.pauli),
                                  e1.t + e2.t, merged_multiset({&e1.terms, &e2.terms}),
                                  e1.support | e2.support);
            break;
        }
        case 6: {
            // Hermitian part of M = E2^dagger X E1
            block.c = 6.0 * c * e1.b * e2.b / g;
            double alpha = x_zero ? 0.0 : e2.product.coeff * xr * e1.product.coeff;
            PauliString m =
                pauli_mul(pauli_mul(e2.product.pauli.adjoint(), xp), e1.product.pauli);
            block.x = symmetrized(alpha, m, x.degree + e1.t + e2.t,
                                  merged_multiset({&x.term_multiset, &e1.terms, &e2.terms}),
                                  x.formal_support | e1.support | e2.support);
            break;
        }
        default:
            throw std::invalid_argument("pin_step: xi out of range");
    }

    out.s &= ~h.term_support(ctx.a_star);

    if (state.beta <= potential_beta(h) && !potential_bound_holds(h, out))
        throw std::logic_error("pin_step: potential bound violated below beta_pot");
    return out;
}

PinState pin_step(const Hamiltonian& h, const PinState& state, Rng& rng,
                  PinTranscript* transcript_out) {
    PinContext ctx = prepare_pin(h, state);
    PinTranscript tr;
    sample_propagator(h, ctx.active, ctx.q, state.beta / 2.0, state.t_max, rng, &tr.sample1);
    sample_propagator(h, ctx.active, ctx.q, state.beta / 2.0, state.t_max, rng, &tr.sample2);
    double u = rng.uniform_double();
    tr.xi = (u < 1.0 - state.gamma)
                ? 0
                : 1 + std::min(5, static_cast<int>((u - (1.0 - state.gamma)) / (state.gamma / 6.0)));
    if (transcript_out) *transcript_out = tr;
    return pin_step_apply(h, state, tr);
}

double pin_transcript_probability(const Hamiltonian& h, const PinState& state,
                                  const PinTranscript& tr) {
    PinContext ctx = prepare_pin(h, state);
    double p1 =
        prop_transcript_probability(h, ctx.active, ctx.q, state.t_max, tr.sample1);
    double p2 =
        prop_transcript_probability(h, ctx.active, ctx.q, state.t_max, tr.sample2);
    double pxi = (tr.xi == 0) ? 1.0 - state.gamma : state.gamma / 6.0;
    return p1 * p2 * pxi;
}

void enumerate_pin_step(const Hamiltonian& h, const PinState& state, const PinVisitor& visit,
                        long max_branches) {
    if (!state.t_max)
        throw std::invalid_argument("enumerate_pin_step: needs finite t_max");
    PinContext ctx = prepare_pin(h, state);

    std::vector<std::pair<PropTranscript, double>> branches;
    enumerate_propagator(
        h, ctx.active, ctx.q, state.beta / 2.0, *state.t_max,
        [&](const PropTranscript& tr, double prob, const MonomialSample&) {
            branches.push_back({tr, prob});
        },
        max_branches);

    if (static_cast<long>(branches.size()) * static_cast<long>(branches.size()) * 7 >
        max_branches)
        throw std::runtime_error("enumerate_pin_step: branch tree too large");

    for (const auto& [tr1, p1] : branches)
        for (const auto& [tr2, p2] : branches)
            for (int xi = 0; xi <= 6; ++xi) {
                PinTranscript tr{tr1, tr2, xi};
                double pxi = (xi == 0) ? 1.0 - state.gamma : state.gamma / 6.0;
                visit(tr, p1 * p2 * pxi, pin_step_apply(h, state, tr));
            }
}

bool potential_bound_holds(const Hamiltonian& h, const PinState& state, double slack) {
    double beta_pot = potential_beta(h);
    for (const ConfigBlock& b : state.config.blocks) {
        double bound = std::pow(1.0 - state.gamma, state.s.and_count(b.x.formal_support)) *
                       std::pow(state.beta / beta_pot, b.x.degree);
        if (std::abs(b.c) > bound * (1.0 + slack)) return false;
    }
    return true;
}

bool config_neighbor_invariant_holds(const Hamiltonian& h, const PinState& state) {
    TermSet restricted = h.restricted_terms(state.s);
    Bits neighborhood(h.term_count());
    for (int a : restricted) {
        neighborhood.set(a);
        for (int b : h.neighbors(a)) neighborhood.set(b);
    }
    for (size_t i = 0; i + 1 < state.config.blocks.size(); ++i)
        for (int a : state.config.blocks[i].x.term_multiset)
            if (neighborhood.test(a)) return false;
    return true;
}

Configuration run_separability(const Hamiltonian& h, double beta, Rng& rng,
                               bool unsafe_override) {
    double threshold = h.critical_beta(BetaMode::Separability);
    if (beta > threshold && !unsafe_override)
        throw std::invalid_argument(
            "run_separability: beta exceeds 1/(100 Delta K); pass the unsafe override to force");
    if (beta == threshold)
        std::fputs("run_separability: beta sits exactly at the 1/(100 Delta K) threshold\n",
                   stderr);
    PinState state = initial_pin_state(h, beta, std::nullopt);
    while (!h.restricted_terms(state.s).empty()) state = pin_step(h, state, rng);
    return state.config;
}

DenseOp evaluate_config_dense(const Configuration& config, int n) {
    require_dense_size(n, "evaluate_config_dense");
    Bits used(n);
    const long dim = 1L << n;
    DenseOp out = DenseOp::Identity(dim, dim);
    for (const ConfigBlock& b : config.blocks) {
        if (used.intersects(b.x.formal_support))
            throw std::logic_error("evaluate_config_dense: block supports overlap");
        used |= b.x.formal_support;
        if (b.x.is_zero()) continue;
        if (b.x.value->pauli.sites() != n)
            throw std::logic_error("evaluate_config_dense: block on wrong site count");
        // Disjoint supports let the full-space factors multiply directly.
        DenseOp factor = DenseOp::Identity(dim, dim) +
                         b.c * b.x.value->coeff * pauli_to_dense(b.x.value->pauli);
        out = out * factor;
    }
    return out;
}

double config_trace(const Configuration& config, int n) {
    double tr = std::pow(2.0, n);
    for (const ConfigBlock& b : config.blocks) {
        if (b.x.is_zero()) continue;
        if (b.x.value->pauli.is_identity_body()) tr *= 1.0 + b.c * b.x.value->coeff;
    }
    return tr;
}

nlohmann::json config_to_json(const Configuration& config) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const ConfigBlock& b : config.blocks) {
        nlohmann::json rec;
        rec["c"] = b.c;
        rec["degree"] = b.x.degree;
        rec["terms"] = b.x.term_multiset;
        if (b.x.is_zero()) {
            rec["value"] = {{"zero", true}};
        } else {
            rec["value"] = {{"r", b.x.value->coeff}, {"pauli", b.x.value->pauli.to_string()}};
        }
        blocks.push_back(rec);
    }
    return blocks;
}

Configuration config_from_json(const Hamiltonian& h, const nlohmann::json& j) {
    Configuration config;
    for (const auto& rec : j) {
        ConfigBlock b;
        b.c = rec.at("c").get<double>();
        b.x.degree = rec.at("degree").get<int>();
        b.x.term_multiset = rec.at("terms").get<std::vector<int>>();
        b.x.formal_support = Bits(h.sites());
        for (int a : b.x.term_multiset) b.x.formal_support |= h.term_support(a);
        const auto& val = rec.at("value");
        if (val.contains("zero")) {
            b.x.value = std::nullopt;
        } else {
            b.x.value = ScaledPauli{
                val.at("r").get<double>(),
                PauliString::parse(h.sites(), val.at("pauli").get<std::string>())};
        }
        config.blocks.push_back(std::move(b));
    }
    return config;
}

} // namespace gibbsprep
