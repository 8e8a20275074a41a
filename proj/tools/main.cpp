// gibbsprep: generate model instances, sample high-temperature Gibbs states
// as stabilizer product states, estimate log-partition functions, and run the
// verification suites.

#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "gibbsprep/models.hpp"
#include "gibbsprep/tree.hpp"
#include "gibbsprep/verify.hpp"

using namespace gibbsprep;

namespace {

constexpr const char* kSchemaVersion = "1";

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file " + path);
    return file;
}

void print_model_info(const Hamiltonian& h) {
    std::cerr << "n=" << h.sites() << " terms=" << h.term_count() << " locality=" << h.locality()
              << " degree=" << h.degree() << "\n"
              << "beta_c separability = " << h.critical_beta(BetaMode::Separability) << "\n"
              << "beta_c sampling     = " << h.critical_beta(BetaMode::Sampling) << "\n"
              << "beta_c cluster      = " << h.critical_beta(BetaMode::Cluster) << "\n";
}

int cmd_gen(const std::string& family, int n, int rows, int cols, int m, int k, double jz,
            double jx, double coeff_min, double coeff_max, uint64_t seed,
            const std::string& out_path) {
    Hamiltonian h = [&]() {
        if (family == "chain-tfim") return chain_tfim(n, jz, jx);
        if (family == "grid-zz") return grid_zz(rows, cols, jz);
        if (family == "heisenberg-chain") return heisenberg_chain(n, jz);
        if (family == "random-klocal") return random_klocal(n, m, k, coeff_min, coeff_max, seed);
        throw CLI::ValidationError("unknown family " + family);
    }();
    std::ofstream file;
    open_out(file, out_path) << h.to_file_string();
    print_model_info(h);
    return 0;
}

int cmd_sample(const std::string& ham_path, double beta, double eps, double delta, long n_samples,
               uint64_t seed, bool unsafe_beta, bool telemetry, long steps_override,
               long epochs_override, int threads, const std::string& out_path) {
    Hamiltonian h = Hamiltonian::load(ham_path);
    GibbsSampler sampler(h, beta, eps, delta, unsafe_beta);
    if (steps_override > 0) sampler.params().steps_per_epoch = steps_override;
    if (epochs_override > 0) sampler.params().max_epochs = epochs_override;

    std::ofstream file;
    std::ostream& out = open_out(file, out_path);

    nlohmann::json header;
    header["beta"] = beta;
    header["delta"] = delta;
    header["epsilon"] = eps;
    header["n"] = h.sites();
    header["n_samples"] = n_samples;
    header["schema_version"] = kSchemaVersion;
    header["seed"] = seed;
    out << header.dump() << "\n";

    // Attempts are indexed; each index has its own derived seed, so any
    // sample can be reproduced alone. Failed walks are redrawn at the next
    // index. Chunked parallelism keeps output independent of thread count.
    std::mutex telemetry_mu;
    long failures = 0;
    long emitted = 0;
    long next_start = 0;
    const long chunk = 512;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;

    while (emitted < n_samples) {
        long begin = next_start;
        long end = begin + chunk;
        next_start = end;
        std::vector<std::optional<ProductState>> results(chunk);
        std::atomic<long> cursor{begin};
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&]() {
                for (;;) {
                    long idx = cursor.fetch_add(1);
                    if (idx >= end) break;
                    Rng rng = Rng::for_sample(seed, static_cast<uint64_t>(idx));
                    WalkStats stats;
                    StepTelemetry stream = nullptr;
                    if (telemetry)
                        stream = [&, idx](long step, int depth, char move, double ratio) {
                            std::lock_guard<std::mutex> lock(telemetry_mu);
                            std::cerr << "{\"attempt\":" << idx << ",\"step\":" << step
                                      << ",\"depth\":" << depth << ",\"move\":\"" << move
                                      << "\",\"r_hat_ratio\":" << ratio << "}\n";
                        };
                    results[idx - begin] = sampler.sample(rng, &stats, stream);
                    if (telemetry) {
                        std::lock_guard<std::mutex> lock(telemetry_mu);
                        std::cerr << "{\"attempt\":" << idx
                                  << ",\"epochs_used\":" << stats.epochs_used
                                  << ",\"leaf_depth\":" << stats.leaf_depth
                                  << ",\"ratio_queries\":" << stats.ratio_queries << "}\n";
                    }
                }
            });
        for (auto& t : pool) t.join();

        for (long idx = begin; idx < end && emitted < n_samples; ++idx) {
            const auto& res = results[idx - begin];
            if (!res) {
                ++failures;
                continue;
            }
            nlohmann::json rec = product_state_to_json(*res);
            rec["seed"] = splitmix64(seed + static_cast<uint64_t>(idx));
            out << rec.dump() << "\n";
            ++emitted;
        }
    }

    nlohmann::json summary;
    summary["failures"] = failures;
    summary["type"] = "summary";
    out << summary.dump() << "\n";
    if (failures > 0) std::cerr << "redrew " << failures << " failed walks\n";
    return 0;
}

int cmd_logz(const std::string& ham_path, double beta, double eta) {
    Hamiltonian h = Hamiltonian::load(ham_path);
    auto start = std::chrono::steady_clock::now();
    LogZResult res = log_partition_estimate(h, beta, eta);
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    nlohmann::json j;
    j["beta"] = beta;
    j["cluster_count"] = res.series.cluster_count;
    j["elapsed"] = elapsed;
    j["eta"] = eta;
    j["k_capped"] = res.series.k_capped;
    j["k_used"] = res.series.k_used;
    j["schema_version"] = kSchemaVersion;
    j["truncation_bound"] = res.series.truncation_bound;
    j["z_hat"] = res.z_hat;
    if (h.sites() <= 10) {
        Eigen::SelfAdjointEigenSolver<DenseOp> es(hamiltonian_to_dense(h),
                                                  Eigen::EigenvaluesOnly);
        double shift = es.eigenvalues().minCoeff();
        double exact =
            -beta * shift + std::log((-beta * (es.eigenvalues().array() - shift)).exp().sum());
        j["dense_exact"] = exact;
        j["error"] = res.z_hat - exact;
    }
    std::cout << j.dump() << "\n";
    return 0;
}

int cmd_verify(const std::string& suite, bool json) {
    bool all_pass = true;
    for (int id : criteria_for_suite(suite)) {
        CriterionReport rep = run_criterion(id);
        if (json) {
            nlohmann::json j = rep.to_json();
            j["suite"] = suite;
            std::cout << j.dump() << "\n";
        } else {
            std::cout << rep.summary_line() << "\n";
        }
        std::cout.flush();
        all_pass = all_pass && rep.pass;
    }
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stabilizer-product sampling of high-temperature Gibbs states"};
    app.require_subcommand(1);

    // gen
    std::string family, out_path;
    int n = 4, rows = 2, cols = 2, m = 8, k = 2;
    double jz = 1.0, jx = 1.0, coeff_min = -1.0, coeff_max = 1.0;
    uint64_t seed = 1;
    auto* gen = app.add_subcommand("gen", "generate a Hamiltonian instance file");
    gen->add_option("--family", family, "chain-tfim | grid-zz | heisenberg-chain | random-klocal")
        ->required();
    gen->add_option("--n", n, "site count (chains, random)");
    gen->add_option("--rows", rows, "grid rows");
    gen->add_option("--cols", cols, "grid cols");
    gen->add_option("--m", m, "term count (random-klocal)");
    gen->add_option("--k", k, "locality (random-klocal)");
    gen->add_option("--jz", jz, "coupling (ZZ / primary)");
    gen->add_option("--jx", jx, "coupling (X field)");
    gen->add_option("--coeff-min", coeff_min, "random coefficient lower bound");
    gen->add_option("--coeff-max", coeff_max, "random coefficient upper bound");
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--out", out_path, "output file (default stdout)");

    // sample
    std::string ham_path;
    double beta = 0.001, eps = 0.1, delta = 0.01, eta = 0.01;
    long n_samples = 1;
    uint64_t sample_seed = 0;
    bool unsafe_beta = false, telemetry = false, verify_json = false;
    long steps_override = 0, epochs_override = 0;
    int threads = 0;
    auto* sample = app.add_subcommand("sample", "sample stabilizer product states");
    sample->add_option("hamiltonian", ham_path, "Hamiltonian file")->required();
    sample->add_option("--beta", beta, "inverse temperature")->required();
    sample->add_option("--eps", eps, "trace-distance target");
    sample->add_option("--delta", delta, "walk failure budget");
    sample->add_option("--n-samples", n_samples, "number of output samples");
    sample->add_option("--seed", sample_seed, "master seed (per-sample seeds derived)")
        ->required();
    sample->add_flag("--unsafe-beta", unsafe_beta, "bypass the beta threshold gate");
    sample->add_flag("--telemetry", telemetry, "per-step walk telemetry on stderr");
    sample->add_option("--steps-per-epoch", steps_override, "override the chain step budget");
    sample->add_option("--max-epochs", epochs_override, "override the epoch budget");
    sample->add_option("--threads", threads, "worker threads (default: hardware)");
    sample->add_option("--out", out_path, "output file (default stdout)");

    // logz
    auto* logz = app.add_subcommand("logz", "estimate log tr(e^{-beta H})");
    logz->add_option("hamiltonian", ham_path, "Hamiltonian file")->required();
    logz->add_option("--beta", beta, "inverse temperature")->required();
    logz->add_option("--eta", eta, "additive accuracy");

    // verify
    std::string suite = "all";
    auto* verify = app.add_subcommand("verify", "run verification suites");
    verify->add_option("--suite", suite,
                       "algebra | unbiased | potential | cluster | sandwich | end2end | tree | all");
    verify->add_flag("--json", verify_json, "emit full JSON reports");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen(family, n, rows, cols, m, k, jz, jx, coeff_min, coeff_max, seed,
                           out_path);
        if (sample->parsed())
            return cmd_sample(ham_path, beta, eps, delta, n_samples, sample_seed, unsafe_beta,
                              telemetry, steps_override, epochs_override, threads, out_path);
        if (logz->parsed()) return cmd_logz(ham_path, beta, eta);
        if (verify->parsed()) return cmd_verify(suite, verify_json);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
