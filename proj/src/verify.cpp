#include "gibbsprep/verify.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "gibbsprep/models.hpp"
#include "gibbsprep/tree.hpp"

namespace gibbsprep {

namespace {

using Clock = std::chrono::steady_clock;

struct Timer {
    Clock::time_point start = Clock::now();
    double seconds() const {
        return std::chrono::duration<double>(Clock::now() - start).count();
    }
};

double max_abs(const DenseOp& a) { return a.cwiseAbs().maxCoeff(); }

void record(CriterionReport& rep, const std::string& name, double value) {
    rep.margins.push_back({name, value});
}

PauliString random_phased_pauli(int n, Rng& rng) {
    Bits x(n), z(n);
    for (int i = 0; i < n; ++i) {
        if (rng.fair_coin()) x.set(i);
        if (rng.fair_coin()) z.set(i);
    }
    return PauliString(n, x, z, rng.uniform_index(4));
}

DenseOp monomial_dense(const Hamiltonian& h, const MonomialSample& s) {
    const long dim = 1L << h.sites();
    DenseOp e = DenseOp::Identity(dim, dim);
    for (int a : s.terms) e = e * term_to_dense(h, a);
    return s.coeff * e;
}

double dense_log_partition(const Hamiltonian& h, double beta) {
    Eigen::SelfAdjointEigenSolver<DenseOp> es(hamiltonian_to_dense(h), Eigen::EigenvaluesOnly);
    double shift = es.eigenvalues().minCoeff();
    return -beta * shift + std::log((-beta * (es.eigenvalues().array() - shift)).exp().sum());
}

} // namespace

nlohmann::json CriterionReport::to_json() const {
    nlohmann::json j;
    j["schema_version"] = "1";
    j["criterion"] = id;
    j["name"] = name;
    j["pass"] = pass;
    j["cases"] = cases;
    j["failures"] = failures;
    j["elapsed_seconds"] = elapsed_seconds;
    nlohmann::json m = nlohmann::json::object();
    for (const auto& [key, value] : margins) m[key] = value;
    j["margins"] = m;
    return j;
}

std::string CriterionReport::summary_line() const {
    std::ostringstream out;
    out << (pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << name << " ("
        << cases << " cases, " << failures << " failures, " << elapsed_seconds << " s)";
    return out.str();
}

// 1. Exact Pauli algebra: every product matches dense multiplication.
CriterionReport verify_pauli_algebra() {
    Timer timer;
    CriterionReport rep{1, "pauli algebra vs dense multiplication"};
    double worst = 0.0;

    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            PauliString p = PauliString::single(1, 0, static_cast<Axis>(a));
            PauliString q = PauliString::single(1, 0, static_cast<Axis>(b));
            double diff =
                max_abs(pauli_to_dense(pauli_mul(p, q)) - pauli_to_dense(p) * pauli_to_dense(q));
            worst = std::max(worst, diff);
            ++rep.cases;
            if (diff > 1e-12) ++rep.failures;
        }

    Rng rng(20240601);
    for (int r = 0; r < 1000; ++r) {
        int n = 1 + r % 3;
        PauliString p = random_phased_pauli(n, rng);
        PauliString q = random_phased_pauli(n, rng);
        PauliString prod = pauli_mul(p, q);
        // integer phase arithmetic: re-multiplying by the adjoint restores identity phase
        PauliString round = pauli_mul(prod, prod.adjoint());
        double diff =
            max_abs(pauli_to_dense(prod) - pauli_to_dense(p) * pauli_to_dense(q));
        worst = std::max(worst, diff);
        ++rep.cases;
        if (diff > 1e-12 || round != PauliString::identity(n)) ++rep.failures;
    }

    record(rep, "max_entry_diff", worst);
    rep.pass = rep.failures == 0;
    rep.elapsed_seconds = timer.seconds();
    return rep;
}

// 2. Exhaustive branch enumeration of both samplers vs the dense recurrence.
CriterionReport verify_sampler_unbiasedness() {
    Timer timer;
    CriterionReport rep{2, "sampler unbiasedness via exhaustive enumeration"};
    double worst = 0.0;

    for (int inst = 0; inst < 10; ++inst) {
        Hamiltonian h = random_klocal(3, 1 + inst % 2, 2, -1.0, 1.0, 5000 + inst);
        Rng rng(inst);
        TermSet q;
        for (int a = 0; a < h.term_count(); ++a)
            if (q.empty() || rng.fair_coin()) q.push_back(a);
        const long dim = 1L << h.sites();

        for (int k = 0; k <= 3; ++k) {
            DenseOp acc = DenseOp::Zero(dim, dim);
            enumerate_f_k(h, all_terms_mask(h), q, k,
                          [&](const FkTranscript&, double prob, const MonomialSample& s) {
                              acc += prob * monomial_dense(h, s);
                          });
            double diff = max_abs(acc - f_k_dense(h, all_terms_mask(h), q, k));
            worst = std::max(worst, diff);
            ++rep.cases;
            if (diff > 1e-10) ++rep.failures;
        }

        double beta = h.critical_beta(BetaMode::Sampling);
        DenseOp acc = DenseOp::Zero(dim, dim);
        enumerate_propagator(h, all_terms_mask(h), q, beta, 3,
                             [&](const PropTranscript&, double prob, const MonomialSample& s) {
                                 acc += prob * (DenseOp::Identity(dim, dim) + monomial_dense(h, s));
                             });
        double diff = max_abs(acc - truncated_series_dense(h, q, beta, 3));
        worst = std::max(worst, diff);
        ++rep.cases;
        if (diff > 1e-10) ++rep.failures;
    }

    record(rep, "max_entry_diff", worst);
    rep.pass = rep.failures == 0;
    rep.elapsed_seconds = timer.seconds();
    return rep;
}

// 3. Coefficient bounds over randomized draws.
CriterionReport verify_coefficient_bounds() {
    Timer timer;
    CriterionReport rep{3, "sampler coefficient bounds"};
    double worst_ratio = 0.0; // |coeff| / bound, should stay <= 1

    for (int inst = 0; inst < 10; ++inst) {
        Hamiltonian h = random_klocal(6, 7, 2, -1.0, 1.0, 6000 + inst);
        Rng rng(900 + inst);
        TermSet q = h.localized_terms(h.term_support(inst % h.term_count()));
        double cap = std::max(2.0 * (h.degree() + 1), static_cast<double>(q.size()));
        double beta = h.critical_beta(BetaMode::Sampling) * rng.uniform_double();

        for (int r = 0; r < 5000; ++r) {
            int k = r % 5;
            MonomialSample s = sample_f_k(h, q, k, rng);
            double bound = std::pow(cap, k);
            for (int i = 2; i <= k; ++i) bound *= i;
            double ratio = (k == 0) ? std::abs(s.coeff) : std::abs(s.coeff) / bound;
            worst_ratio = std::max(worst_ratio, ratio);
            ++rep.cases;
            if (std::abs(s.coeff) > bound * (1 + 1e-12)) ++rep.failures;
        }
        for (int r = 0; r < 5000; ++r) {
            std::optional<int> t_max = (r % 2 == 0) ? std::optional<int>(6) : std::nullopt;
            MonomialSample s = sample_propagator(h, q, beta, t_max, rng);
            int t = s.degree();
            ++rep.cases;
            if (t == 0) {
                if (s.coeff != 0.0) ++rep.failures;
            } else {
                double bound = std::pow(2.0 * beta * cap, t);
                worst_ratio = std::max(worst_ratio, std::abs(s.coeff) / bound);
                if (std::abs(s.coeff) > bound * (1 + 1e-12)) ++rep.failures;
            }
        }
    }

    record(rep, "worst_coeff_over_bound", worst_ratio);
    rep.pass = rep.failures == 0;
    rep.elapsed_seconds = timer.seconds();
    return rep;
}

// 4. Monte Carlo mean of the separability sampler vs dense e^{-beta H}.
CriterionReport verify_separability_mean() {
    Timer timer;
    CriterionReport rep{4, "separability sampler mean vs e^{-beta H}"};

    Hamiltonian h = chain_tfim(4);
    double beta = h.critical_beta(BetaMode::Separability) / 2.0;
    const long runs = 200000;
    const long dim = 1L << h.sites();

    DenseOp sum = DenseOp::Zero(dim, dim);
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(dim, dim);
    std::atomic<long> counter{0};
    std::mutex merge_mu;

    int workers = std::max(2u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w]() {
            DenseOp local_sum = DenseOp::Zero(dim, dim);
            Eigen::MatrixXd local_sq = Eigen::MatrixXd::Zero(dim, dim);
            for (;;) {
                long idx = counter.fetch_add(1);
                if (idx >= runs) break;
                Rng rng = Rng::for_sample(777001, idx);
                DenseOp sigma = evaluate_config_dense(run_separability(h, beta, rng), h.sites());
                local_sum += sigma;
                local_sq += sigma.cwiseAbs2().real();
            }
            std::lock_guard<std::mutex> lock(merge_mu);
            sum += local_sum;
            sq += local_sq;
        });
    for (auto& t : pool) t.join();

    DenseOp mean = sum / static_cast<double>(runs);
    Eigen::MatrixXd var =
        sq / static_cast<double>(runs) - mean.cwiseAbs2().real();
    double se = std::sqrt(std::max(var.sum(), 0.0) / static_cast<double>(runs));
    DenseOp target = hermitian_expm(hamiltonian_to_dense(h), -beta);
    double dist = (mean - target).norm();

    rep.cases = runs;
    rep.failures = dist <= 5.0 * se ? 0 : 1;
    record(rep, "frobenius_distance", dist);
    record(rep, "standard_error", se);
    record(rep, "allowed", 5.0 * se);
    rep.pass = rep.failures == 0;
    rep.elapsed_seconds = timer.seconds();
    return rep;
}

// 5. Potential invariant and final coefficient bounds over full runs.
CriterionReport verify_potential_invariant() {
    Timer timer;
    CriterionReport rep{5, "potential invariant across full pinning runs"};
    double worst_final = 0.0;

    std::vector<Hamiltonian> instances;
    instances.push_back(chain_tfim(4));
    instances.push_back(grid_zz(1, 5));
    instances.push_back(random_klocal_bounded_degree(5, 6, 2, 3, 7000));

    long violations = 0;
    for (const Hamiltonian& h : instances) {
        double beta = potential_beta(h) / 2.0;
        double beta_sep = h.critical_beta(BetaMode::Separability);
        long runs = 10000 / static_cast<long>(instances.size()) + 1;
        for (long r = 0; r < runs; ++r) {
            Rng rng = Rng::for_sample(888001, r);
            PinState state = initial_pin_state(h, beta, std::nullopt);
            while (!h.restricted_terms(state.s).empty()) {
                state = pin_step(h, state, rng); // throws on a potential violation
                ++rep.cases;
                if (!potential_bound_holds(h, state)) ++violations;
                if (!config_neighbor_invariant_holds(h, state)) ++violations;
            }
            for (const ConfigBlock& b : state.config.blocks) {
                double bound = std::pow(beta / beta_sep, b.x.degree);
                worst_final = std::max(worst_final, std::abs(b.c) / bound);
                if (std::abs(b.c) > bound * (1 + 1e-9)) ++violations;
            }
        }
    }

    rep.failures = violations;
    record(rep, "worst_final_coeff_over_bound", worst_final);
    rep.pass = violations == 0;
    rep.elapsed_seconds = timer.seconds();
    return rep;
}

namespace {

// Exact expectation of the emission distribution for one block: mixing branch
// plus the even-parity correlated branch; uniform sites average to I/2.
DenseOp block_emission_expectation(const ConfigBlock& b, int n) {
    const long dim = 1L << n;
    double cr = b.x.is_zero() ? 0.0 : b.c * b.x.value->coeff;
    const PauliString p = b.x.is_zero() ? PauliString::identity(n) : b.x.value->pauli;
    DenseOp mix = DenseOp::Identity(dim, dim) / static_cast<double>(dim);
    if (p.is_identity_body() || cr == 0.0) return mix;

    std::vector<int> supp = p.support().to_indices();
    int k = static_cast<int>(supp.size());
    int parity = cr > 0 ? 1 : -1;
    DenseOp corr = DenseOp::Zero(dim, dim);
    int strings = 0;
    for (int bits = 0; bits < (1 << k); ++bits) {
        int prod = 1;
        for (int i = 0; i < k; ++i) prod *= (bits >> i & 1) ? -1 : 1;
        if (prod != parity) continue;
        ++strings;
        DenseOp state = DenseOp::Identity(1, 1);
        for (int site = 0; site < n; ++site) {
            DenseOp m;
            auto it = std::find(supp.begin(), supp.end(), site);
            if (it == supp.end()) {
                m = DenseOp::Identity(2, 2) / 2.0;
            } else {
                int sign = (bits >> (it - supp.begin()) & 1) ? -1 : 1;
                m = 0.5 * (DenseOp::Identity(2, 2) +
                           static_cast<double>(sign) *
                               pauli_to_dense(PauliString::single(1, 0, p.axis_at(site))));
            }
            DenseOp next(2 * state.rows(), 2 * state.cols());
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    next.block(i * state.rows(), j * state.cols(), state.rows(), state.cols()) =
                        m(i, j) * state;
            state = next;
        }
        corr += state;
    }
    corr /= strings;
    return std::abs(cr) * corr + (1.0 - std::abs(cr)) * mix;
}

} // namespace

// 6. Stabilizer emission reproduces the normalized block operator exactly.
CriterionReport verify_stabilizer_emission() {
    Timer timer;
    CriterionReport rep{6, "stabilizer emission vs normalized block operator"};
    double worst = 0.0;
    Rng rng(20240606);
    const int n = 4;

    for (int r = 0; r < 200; ++r) {
        ConfigBlock b;
        int size = 1 + rng.uniform_index(4);
        std::vector<int> sites;
        while (static_cast<int>(sites.size()) < size) {
            int s = rng.uniform_index(n);
            if (std::find(sites.begin(), sites.end(), s) == sites.end()) sites.push_back(s);
        }
        std::sort(sites.begin(), sites.end());
        std::vector<std::pair<int, Axis>> axes;
        for (int s : sites) axes.push_back({s, static_cast<Axis>(1 + rng.uniform_index(3))});
        b.c = 2.0 * rng.uniform_double() - 1.0;
        if (r % 17 == 0) {
            b.x.value = std::nullopt; // zero-valued block: maximally mixed
            b.x.formal_support = Bits::from_indices(n, sites);
        } else {
            double rr = 2.0 * rng.uniform_double() - 1.0;
            b.x.value = ScaledPauli{rr, PauliString::from_axes(n, axes)};
            b.x.formal_support = b.x.value->pauli.support();
        }

        Configuration config{{b}};
        DenseOp sigma = evaluate_config_dense(config, n);
        DenseOp target = sigma / sigma.trace().real();
        double diff = max_abs(block_emission_expectation(b, n) - target);
        worst = std::max(worst, diff);
        ++rep.cases;
        if (diff > 1e-12) ++rep.failures;
    }

    record(rep, "max_entry_diff", worst);
    rep.pass = rep.failures == 0;
    rep.elapsed_seconds = timer.seconds();
    return rep;
}

// 7. Cluster-expansion estimate within eta of the dense log-partition value.
CriterionReport verify_cluster_accuracy() {
    Timer timer;
    CriterionReport rep{7, "cluster expansion accuracy vs dense oracle"};
    double worst = 0.0;

    std::vector<Hamiltonian> instances;
    instances.push_back(chain_tfim(5));
    instances.push_back(chain_tfim(6));
    instances.push_back(chain_tfim(7));
    instances.push_back(chain_tfim(8));
    instances.push_back(grid_zz(2, 3));
    instances.push_back(grid_zz(2, 4));
    instances.push_back(grid_zz(1, 8));
    instances.push_back(random_klocal_bounded_degree(6, 8, 2, 4, 7100));
    instances.push_back(random_klocal_bounded_degree(7, 9, 2, 4, 7200));
    instances.push_back(random_klocal_bounded_degree(8, 10, 2, 4, 7300));

    for (const Hamiltonian& h : instances) {
        double beta = 1.0 / (200.0 * std::max(h.degree(), 1));
        double exact = dense_log_partition(h, beta);
        for (double eta : {0.1, 0.01}) {
            LogZResult res = log_partition_estimate(h, beta, eta);
            double err = std::abs(res.z_hat - exact);
            worst = std::max(worst, err / eta);
            ++rep.cases;
            if (err > eta) ++rep.failures;
        }
    }

    record(rep, "worst_error_over_eta", worst);
    rep.pass = rep.failures == 0;
    rep.elapsed_seconds = timer.seconds();
    return rep;
}

// 8. Structural lemma checks on the 20-instance regression corpus.
CriterionReport verify_structural_lemmas() {
    Timer timer;
    CriterionReport rep{8, "spectral sandwich and peeling checks"};
    double worst_margin = 1e300;
    const double c = 10.0;
    Rng prng(20240608);

    for (int i = 0; i < 20; ++i) {
        Hamiltonian h = random_klocal_bounded_degree(5, 7, 2, 3, 9000 + i);
        double beta = 0.99 / (2.0 * c * (h.degree() + 1));
        int a_star = i % h.term_count();

        SandwichReport sw = check_spectral_sandwich(h, a_star, beta, c);
        ++rep.cases;
        if (!sw.precondition_ok || !sw.pass) ++rep.failures;
        worst_margin = std::min({worst_margin, sw.margin_lower, sw.margin_upper});

        const long dim = 1L << h.sites();
        PeelingReport pl = check_peeling(h, a_star, DenseOp::Identity(dim, dim), 4, beta, c);
        ++rep.cases;
        if (!pl.precondition_ok || !pl.pass) ++rep.failures;
        worst_margin = std::min({worst_margin, pl.margin_lower, pl.margin_upper});

        DenseOp g = DenseOp::Random(dim, dim);
        Eigen::SelfAdjointEigenSolver<DenseOp> es(g + g.adjoint());
        Eigen::VectorXd vals(dim);
        for (long v = 0; v < dim; ++v) vals(v) = 0.5 + 1.5 * prng.uniform_double();
        DenseOp p = es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
        PeelingReport pl1 = check_peeling(h, a_star, p, 1, beta, c);
        ++rep.cases;
        if (!pl1.precondition_ok || !pl1.pass) ++rep.failures;
        worst_margin = std::min({worst_margin, pl1.margin_lower, pl1.margin_upper});
    }

    // negative test: 10x beta must be reported as a violation of the lemma's
    // temperature precondition
    {
        Hamiltonian h = random_klocal_bounded_degree(5, 7, 2, 3, 9000);
        double beta10 = 10.0 * 0.99 / (2.0 * c * (h.degree() + 1));
        SandwichReport sw = check_spectral_sandwich(h, 0, beta10, c);
        ++rep.cases;
        if (sw.precondition_ok) ++rep.failures;
        PeelingReport pl = check_peeling(h, 0, DenseOp::Identity(32, 32), 2, beta10, c);
        ++rep.cases;
        if (pl.precondition_ok) ++rep.failures;
    }

    // pushed far past the threshold, the PSD margins themselves go negative
    {
        bool found = false;
        for (uint64_t seed = 0; seed < 40 && !found; ++seed) {
            Hamiltonian base = random_klocal(5, 8, 2, -1.0, 1.0, seed);
            std::vector<Term> terms;
            for (int a = 0; a < base.term_count(); ++a) {
                Term t = base.term(a);
                t.coeff = t.coeff >= 0 ? 1.0 : -1.0;
                terms.push_back(t);
            }
            Hamiltonian h(5, 2, std::move(terms));
            double beta30 = 30.0 * 0.99 / (2.0 * c * (h.degree() + 1));
            for (int a = 0; a < std::min(4, h.term_count()); ++a)
                if (!check_spectral_sandwich(h, a, beta30, c).pass) found = true;
        }
        ++rep.cases;
        if (!found) ++rep.failures;
    }

    record(rep, "worst_margin", worst_margin);
    rep.pass = rep.failures == 0;
    rep.elapsed_seconds = timer.seconds();
    return rep;
}

// 9. End-to-end: tree-walk Gibbs sampler output mixture vs the dense state.
CriterionReport verify_end_to_end_sampling() {
    Timer timer;
    CriterionReport rep{9, "end-to-end Gibbs sampling trace distance"};

    Hamiltonian h = chain_tfim(4);
    double beta = h.critical_beta(BetaMode::Separability) / 4.0;
    double epsilon = 0.1, delta = 0.01;
    const long n_samples = 100000;
    const int n = h.sites();
    const long dim = 1L << n;

    GibbsSampler sampler(h, beta, epsilon, delta);
    // desk-scale chain budget; the distance assertion below is the validation
    sampler.params().steps_per_epoch = 3000;

    // count the 6^n distinct product states
    std::vector<long> counts(static_cast<size_t>(std::pow(6, n)), 0);
    std::atomic<long> produced{0};
    std::atomic<long> failures{0};
    std::atomic<long> next_index{0};
    std::mutex merge_mu;

    int workers = std::max(2u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            std::vector<long> local(counts.size(), 0);
            while (produced.load() < n_samples) {
                long idx = next_index.fetch_add(1);
                Rng rng = Rng::for_sample(999001, idx);
                auto st = sampler.sample(rng);
                if (!st) {
                    failures.fetch_add(1);
                    continue;
                }
                if (produced.fetch_add(1) >= n_samples) break;
                size_t key = 0;
                for (int site = n - 1; site >= 0; --site) {
                    int axis = static_cast<int>(st->sites[site].axis) - 1;
                    int code = axis * 2 + (st->sites[site].sign > 0 ? 0 : 1);
                    key = key * 6 + code;
                }
                ++local[key];
            }
            std::lock_guard<std::mutex> lock(merge_mu);
            for (size_t i = 0; i < counts.size(); ++i) counts[i] += local[i];
        });
    for (auto& t : pool) t.join();

    long total = 0;
    for (long c : counts) total += c;

    // densities of the distinct product states, computed once
    std::vector<DenseOp> densities(counts.size());
    for (size_t key = 0; key < counts.size(); ++key) {
        if (counts[key] == 0) continue;
        ProductState st;
        st.sites.assign(n, SiteState{});
        size_t rem = key;
        for (int site = 0; site < n; ++site) {
            int code = rem % 6;
            rem /= 6;
            st.sites[site].axis = static_cast<Axis>(1 + code / 2);
            st.sites[site].sign = (code % 2 == 0) ? 1 : -1;
        }
        densities[key] = product_state_density(st);
    }

    auto mean_of = [&](const std::vector<long>& c, long m) {
        DenseOp acc = DenseOp::Zero(dim, dim);
        for (size_t key = 0; key < c.size(); ++key)
            if (c[key] > 0) acc += static_cast<double>(c[key]) * densities[key];
        return DenseOp(acc / static_cast<double>(m));
    };

    DenseOp rho = gibbs_density(h, beta);
    double dist = trace_distance(rho, mean_of(counts, total));

    // multinomial bootstrap over the observed counts
    const int boots = 100;
    std::vector<double> boot_dist(boots);
    Rng brng(123321);
    std::vector<double> cdf(counts.size());
    double acc = 0.0;
    for (size_t i = 0; i < counts.size(); ++i) {
        acc += static_cast<double>(counts[i]) / total;
        cdf[i] = acc;
    }
    for (int b = 0; b < boots; ++b) {
        std::vector<long> resample(counts.size(), 0);
        for (long s = 0; s < total; ++s) {
            double u = brng.uniform_double();
            size_t lo = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
            if (lo >= resample.size()) lo = resample.size() - 1;
            ++resample[lo];
        }
        boot_dist[b] = trace_distance(rho, mean_of(resample, total));
    }
    double mean_b = 0.0, var_b = 0.0;
    for (double d : boot_dist) mean_b += d;
    mean_b /= boots;
    for (double d : boot_dist) var_b += (d - mean_b) * (d - mean_b);
    double boot_se = std::sqrt(var_b / (boots - 1));

    double failure_rate =
        static_cast<double>(failures.load()) / (failures.load() + total);

    rep.cases = total;
    if (dist > epsilon + 3.0 * boot_se) ++rep.failures;
    if (failure_rate > 2.0 * delta) ++rep.failures;
    record(rep, "trace_distance", dist);
    record(rep, "allowed", epsilon + 3.0 * boot_se);
    record(rep, "bootstrap_se", boot_se);
    record(rep, "walk_failure_rate", failure_rate);
    rep.pass = rep.failures == 0;
    rep.elapsed_seconds = timer.seconds();
    return rep;
}

// 10. Reversibility and stationary leaf marginals on the enumerated tree.
CriterionReport verify_tree_stationarity() {
    Timer timer;
    CriterionReport rep{10, "tree walk reversibility and stationarity"};

    std::vector<Term> terms(1);
    terms[0].coeff = 1.0;
    terms[0].pauli = SignedPauli(PauliString::from_axes(3, {{0, Axis::Z}, {1, Axis::Z}}));
    Hamiltonian h(3, 2, std::move(terms));
    double beta = h.critical_beta(BetaMode::Sampling) / 2.0;

    EnumeratedTree tree = enumerate_sample_tree(h, beta, 2, 0.01);
    Eigen::MatrixXd p = tree_transition_matrix(tree);
    const int nn = static_cast<int>(tree.nodes.size());

    Eigen::VectorXd pi(nn);
    for (int v = 0; v < nn; ++v) pi(v) = tree.nodes[v].r_hat * tree.nodes[v].omega;
    pi /= pi.sum();

    double stationarity_err = (p * pi - pi).cwiseAbs().maxCoeff();
    double reversibility_err = 0.0;
    for (int v = 0; v < nn; ++v) {
        int u = tree.nodes[v].parent;
        if (u >= 0)
            reversibility_err =
                std::max(reversibility_err, std::abs(p(u, v) * pi(v) - p(v, u) * pi(u)));
    }

    // exact kappa from the leaves upward
    std::vector<double> kappa(nn, 0.0);
    for (int i = nn - 1; i >= 0; --i) {
        if (tree.nodes[i].leaf)
            kappa[i] = config_trace(tree.nodes[i].label.config, h.sites()) * tree.nodes[i].omega;
        if (tree.nodes[i].parent >= 0) kappa[tree.nodes[i].parent] += kappa[i];
    }
    double pi_leaf = 0.0, kappa_leaf = 0.0;
    for (int v = 0; v < nn; ++v)
        if (tree.nodes[v].leaf) {
            pi_leaf += pi(v);
            kappa_leaf += kappa[v];
        }
    double marginal_err = 0.0;
    for (int v = 0; v < nn; ++v)
        if (tree.nodes[v].leaf)
            marginal_err =
                std::max(marginal_err, std::abs(pi(v) / pi_leaf - kappa[v] / kappa_leaf));

    rep.cases = nn;
    if (reversibility_err > 1e-10) ++rep.failures;
    if (stationarity_err > 1e-10) ++rep.failures;
    if (marginal_err > 1e-8) ++rep.failures;
    record(rep, "reversibility_err", reversibility_err);
    record(rep, "stationarity_err", stationarity_err);
    record(rep, "leaf_marginal_err", marginal_err);
    rep.pass = rep.failures == 0;
    rep.elapsed_seconds = timer.seconds();
    return rep;
}

// 11. Rooted polymer counts against the e(1+e(Delta-1))^{w-1} bound.
CriterionReport verify_polymer_counts() {
    Timer timer;
    CriterionReport rep{11, "rooted polymer counts vs analytic bound"};
    double worst = 0.0;

    std::vector<Hamiltonian> instances;
    instances.push_back(chain_tfim(4));
    instances.push_back(grid_zz(2, 2));
    instances.push_back(grid_zz(1, 6));
    instances.push_back(random_klocal_bounded_degree(6, 7, 2, 4, 7500));

    for (const Hamiltonian& h : instances) {
        auto polys = enumerate_polymers(h, all_terms_mask(h), 6);
        std::vector<std::vector<long>> rooted(h.term_count(), std::vector<long>(7, 0));
        for (const Polymer& p : polys) {
            std::vector<int> verts = p.terms;
            verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
            for (int a : verts) ++rooted[a][p.size()];
        }
        for (int a = 0; a < h.term_count(); ++a)
            for (int w = 1; w <= 6; ++w) {
                double bound = polymer_count_bound(h, w);
                worst = std::max(worst, rooted[a][w] / bound);
                ++rep.cases;
                if (static_cast<double>(rooted[a][w]) > bound) ++rep.failures;
            }
    }

    record(rep, "worst_count_over_bound", worst);
    rep.pass = rep.failures == 0;
    rep.elapsed_seconds = timer.seconds();
    return rep;
}

CriterionReport run_criterion(int id) {
    switch (id) {
        case 1: return verify_pauli_algebra();
        case 2: return verify_sampler_unbiasedness();
        case 3: return verify_coefficient_bounds();
        case 4: return verify_separability_mean();
        case 5: return verify_potential_invariant();
        case 6: return verify_stabilizer_emission();
        case 7: return verify_cluster_accuracy();
        case 8: return verify_structural_lemmas();
        case 9: return verify_end_to_end_sampling();
        case 10: return verify_tree_stationarity();
        case 11: return verify_polymer_counts();
        default: throw std::invalid_argument("run_criterion: id must be 1..11");
    }
}

std::vector<int> criteria_for_suite(const std::string& suite) {
    if (suite == "algebra") return {1};
    if (suite == "unbiased") return {2, 3, 6};
    if (suite == "potential") return {5};
    if (suite == "cluster") return {7, 11};
    if (suite == "sandwich") return {8};
    if (suite == "end2end") return {4, 9};
    if (suite == "tree") return {10};
    if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
    throw std::invalid_argument("unknown verify suite: " + suite);
}

} // namespace gibbsprep
