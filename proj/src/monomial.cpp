#include "gibbsprep/monomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gibbsprep {

Bits all_terms_mask(const Hamiltonian& h) {
    return Bits::all_set(h.term_count());
}

nlohmann::json monomial_to_json(const MonomialSample& s) {
    return {{"coeff", s.coeff}, {"terms", s.terms}};
}

namespace {

// Incremental state of the f_k sampler: current term list, running scalar,
// and the closed neighborhood R of the list within the active term set.
struct FkState {
    const Hamiltonian& h;
    const Bits& active;
    const TermSet& q;
    std::vector<int> r; // sorted, deduplicated
    MonomialSample sample{1.0, {}};
    int t = 0;

    FkState(const Hamiltonian& h_, const Bits& active_, const TermSet& q_)
        : h(h_), active(active_), q(q_) {}

    void extend_r(int b) {
        auto add = [&](int a) {
            if (!active.test(a)) return;
            auto it = std::lower_bound(r.begin(), r.end(), a);
            if (it == r.end() || *it != a) r.insert(it, a);
        };
        add(b);
        for (int a : h.neighbors(b)) add(a);
    }

    double step_probability(const FkStep& s) const {
        if (s.heads) return (t / (t + 1.0)) * (1.0 / (2.0 * r.size()));
        return (1.0 / (t + 1.0)) * (1.0 / q.size());
    }

    void apply(const FkStep& s) {
        if (s.heads) {
            if (t == 0) throw std::logic_error("FkState: heads step at t = 0");
            double factor = ((t + 1.0) * 2.0 * r.size() / t) * (s.prepend ? -1.0 : 1.0);
            sample.coeff *= factor;
            if (s.prepend)
                sample.terms.insert(sample.terms.begin(), s.term);
            else
                sample.terms.push_back(s.term);
        } else {
            sample.coeff *= -(t + 1.0) * q.size();
            sample.terms.push_back(s.term);
        }
        extend_r(s.term);
        ++t;
    }

    FkStep draw(Rng& rng) {
        FkStep s;
        s.heads = t > 0 && rng.bernoulli(t / (t + 1.0));
        if (s.heads) {
            s.term = r[rng.uniform_index(static_cast<int>(r.size()))];
            s.prepend = rng.fair_coin();
        } else {
            s.term = q[rng.uniform_index(static_cast<int>(q.size()))];
        }
        return s;
    }
};

void require_fk_inputs(const Bits& active, const TermSet& q, int k) {
    if (k < 0) throw std::invalid_argument("sample_f_k: k must be >= 0");
    if (k >= 1 && q.empty())
        throw std::invalid_argument("sample_f_k: Q must be nonempty when k >= 1");
    for (int a : q)
        if (!active.test(a))
            throw std::invalid_argument("sample_f_k: Q must be a subset of the active terms");
}

// Scale by 2^t beta^t / t! one factor at a time; the pieces overflow long
// before the product does.
double propagator_scale(double beta, int t) {
    double f = 1.0;
    for (int s = 1; s <= t; ++s) f *= 2.0 * beta / s;
    return f;
}

void check_finite(double c) {
    if (!std::isfinite(c))
        throw std::runtime_error("monomial sampler: coefficient overflowed double range");
}

} // namespace

MonomialSample sample_f_k(const Hamiltonian& h, const Bits& active, const TermSet& q, int k,
                          Rng& rng, FkTranscript* transcript_out) {
    require_fk_inputs(active, q, k);
    FkState st(h, active, q);
    if (transcript_out) transcript_out->clear();
    for (int i = 0; i < k; ++i) {
        FkStep s = st.draw(rng);
        st.apply(s);
        if (transcript_out) transcript_out->push_back(s);
    }
    check_finite(st.sample.coeff);
    return st.sample;
}

MonomialSample sample_f_k(const Hamiltonian& h, const TermSet& q, int k, Rng& rng) {
    return sample_f_k(h, all_terms_mask(h), q, k, rng);
}

MonomialSample fk_apply(const Hamiltonian& h, const Bits& active, const TermSet& q,
                        const FkTranscript& steps) {
    require_fk_inputs(active, q, static_cast<int>(steps.size()));
    FkState st(h, active, q);
    for (const FkStep& s : steps) st.apply(s);
    check_finite(st.sample.coeff);
    return st.sample;
}

double fk_transcript_probability(const Hamiltonian& h, const Bits& active, const TermSet& q,
                                 const FkTranscript& steps) {
    FkState st(h, active, q);
    double p = 1.0;
    for (const FkStep& s : steps) {
        p *= st.step_probability(s);
        st.apply(s);
    }
    return p;
}

namespace {

int draw_degree(std::optional<int> t_max, Rng& rng) {
    if (t_max) {
        if (*t_max < 1) throw std::invalid_argument("sample_propagator: t_max must be >= 1");
        for (int t = 1; t <= *t_max; ++t)
            if (rng.fair_coin()) return t;
        return 0; // leftover mass 2^-t_max
    }
    int t = 1;
    while (!rng.fair_coin()) ++t;
    return t;
}

double degree_probability(std::optional<int> t_max, int t) {
    if (t_max) {
        if (t == 0) return std::pow(0.5, *t_max);
        if (t <= *t_max) return std::pow(0.5, t);
        return 0.0;
    }
    return t >= 1 ? std::pow(0.5, t) : 0.0;
}

} // namespace

MonomialSample sample_propagator(const Hamiltonian& h, const Bits& active, const TermSet& q,
                                 double beta, std::optional<int> t_max, Rng& rng,
                                 PropTranscript* transcript_out) {
    if (beta < 0) throw std::invalid_argument("sample_propagator: beta must be >= 0");
    int t = draw_degree(t_max, rng);
    if (transcript_out) *transcript_out = PropTranscript{t, {}};
    if (t == 0) return MonomialSample{0.0, {}};
    MonomialSample s =
        sample_f_k(h, active, q, t, rng, transcript_out ? &transcript_out->steps : nullptr);
    s.coeff *= propagator_scale(beta, t);
    check_finite(s.coeff);
    return s;
}

MonomialSample sample_propagator(const Hamiltonian& h, const TermSet& q, double beta,
                                 std::optional<int> t_max, Rng& rng) {
    return sample_propagator(h, all_terms_mask(h), q, beta, t_max, rng);
}

MonomialSample prop_apply(const Hamiltonian& h, const Bits& active, const TermSet& q, double beta,
                          const PropTranscript& tr) {
    if (tr.t == 0) return MonomialSample{0.0, {}};
    MonomialSample s = fk_apply(h, active, q, tr.steps);
    s.coeff *= propagator_scale(beta, tr.t);
    check_finite(s.coeff);
    return s;
}

double prop_transcript_probability(const Hamiltonian& h, const Bits& active, const TermSet& q,
                                   std::optional<int> t_max, const PropTranscript& tr) {
    double p = degree_probability(t_max, tr.t);
    if (tr.t == 0) return p;
    return p * fk_transcript_probability(h, active, q, tr.steps);
}

namespace {

void enumerate_f_k_rec(const FkState& st, int k, FkTranscript& steps, double prob, long& budget,
                       const FkVisitor& visit) {
    if (st.t == k) {
        if (--budget < 0) throw std::runtime_error("enumerate_f_k: branch tree too large");
        visit(steps, prob, st.sample);
        return;
    }
    auto descend = [&](const FkStep& s) {
        FkState next = st;
        double p = st.step_probability(s);
        next.apply(s);
        steps.push_back(s);
        enumerate_f_k_rec(next, k, steps, prob * p, budget, visit);
        steps.pop_back();
    };
    if (st.t > 0) {
        for (int a : st.r) {
            descend(FkStep{true, a, false});
            descend(FkStep{true, a, true});
        }
    }
    for (int a : st.q) descend(FkStep{false, a, false});
}

} // namespace

void enumerate_f_k(const Hamiltonian& h, const Bits& active, const TermSet& q, int k,
                   const FkVisitor& visit, long max_branches) {
    require_fk_inputs(active, q, k);
    FkState st(h, active, q);
    FkTranscript steps;
    long budget = max_branches;
    enumerate_f_k_rec(st, k, steps, 1.0, budget, visit);
}

void enumerate_propagator(const Hamiltonian& h, const Bits& active, const TermSet& q, double beta,
                          int t_max, const PropVisitor& visit, long max_branches) {
    if (t_max < 1) throw std::invalid_argument("enumerate_propagator: t_max must be >= 1");
    visit(PropTranscript{0, {}}, degree_probability(t_max, 0), MonomialSample{0.0, {}});
    for (int t = 1; t <= t_max; ++t) {
        double pt = degree_probability(t_max, t);
        double scale = propagator_scale(beta, t);
        enumerate_f_k(
            h, active, q, t,
            [&](const FkTranscript& steps, double prob, const MonomialSample& s) {
                MonomialSample scaled = s;
                scaled.coeff *= scale;
                visit(PropTranscript{t, steps}, pt * prob, scaled);
            },
            max_branches);
    }
}

bool terms_in_q_closure(const Hamiltonian& h, const TermSet& q, const std::vector<int>& terms) {
    if (terms.empty()) return true;
    std::vector<int> verts = terms;
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());

    auto index_of = [&](int a) {
        auto it = std::lower_bound(verts.begin(), verts.end(), a);
        return (it != verts.end() && *it == a) ? static_cast<int>(it - verts.begin()) : -1;
    };

    std::vector<int> parent(verts.size());
    for (size_t i = 0; i < verts.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (size_t i = 0; i < verts.size(); ++i)
        for (int b : h.neighbors(verts[i])) {
            int j = index_of(b);
            if (j >= 0) parent[find(static_cast<int>(i))] = find(j);
        }

    std::vector<char> root_touches_q(verts.size(), 0);
    for (int a : q) {
        int i = index_of(a);
        if (i >= 0) root_touches_q[find(i)] = 1;
    }
    for (size_t i = 0; i < verts.size(); ++i)
        if (!root_touches_q[find(static_cast<int>(i))]) return false;
    return true;
}

DenseOp f_k_dense(const Hamiltonian& h, const Bits& active, const TermSet& q, int k) {
    require_dense_size(h.sites(), "f_k_dense");
    const long dim = 1L << h.sites();
    TermSet active_list;
    for (int a = 0; a < h.term_count(); ++a)
        if (active.test(a)) active_list.push_back(a);
    DenseOp hd = restricted_to_dense(h, active_list);
    DenseOp hq = restricted_to_dense(h, q);
    DenseOp f = DenseOp::Identity(dim, dim);
    for (int t = 0; t < k; ++t) f = -(hd * f - f * hd) - f * hq;
    return f;
}

DenseOp truncated_series_dense(const Hamiltonian& h, const Bits& active, const TermSet& q,
                               double beta, int t_max) {
    require_dense_size(h.sites(), "truncated_series_dense");
    const long dim = 1L << h.sites();
    TermSet active_list;
    for (int a = 0; a < h.term_count(); ++a)
        if (active.test(a)) active_list.push_back(a);
    DenseOp hd = restricted_to_dense(h, active_list);
    DenseOp hq = restricted_to_dense(h, q);
    DenseOp f = DenseOp::Identity(dim, dim);
    DenseOp total = f;
    double scale = 1.0;
    for (int t = 1; t <= t_max; ++t) {
        f = -(hd * f - f * hd) - f * hq;
        scale *= beta / t;
        total += scale * f;
    }
    return total;
}

DenseOp truncated_series_dense(const Hamiltonian& h, const TermSet& q, double beta, int t_max) {
    return truncated_series_dense(h, all_terms_mask(h), q, beta, t_max);
}

} // namespace gibbsprep
