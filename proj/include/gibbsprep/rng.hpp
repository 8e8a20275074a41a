#pragma once

#include <cstdint>
#include <random>

namespace gibbsprep {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Seeded RNG with the handful of draws the samplers need. Per-sample streams
// are derived from a master seed by the counter scheme seed_i = splitmix64(master + i),
// so any single sample can be reproduced in isolation.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(splitmix64(seed)) {}

    static Rng for_sample(uint64_t master_seed, uint64_t index) {
        return Rng(splitmix64(master_seed + index));
    }

    uint64_t next_u64() { return gen_(); }

    // uniform over {0, 1, ..., n-1}
    int uniform_index(int n) {
        uint64_t bound = static_cast<uint64_t>(n);
        uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % bound);
        uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return static_cast<int>(x % bound);
    }

    // uniform in [0, 1) with 53 bits of precision
    double uniform_double() { return (gen_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform_double() < p; }

    bool fair_coin() { return gen_() & 1; }

private:
    std::mt19937_64 gen_;
};

} // namespace gibbsprep
