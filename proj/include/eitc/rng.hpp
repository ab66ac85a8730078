// Deterministic random number generation.
//
// Every randomized stage of the pipeline (phantom sampling, masks, noise,
// training, sampling) owns an independent stream derived from the master
// seed with a counter-based splitter, so any stage can be reproduced in
// isolation. Gaussian and uniform draws are generated explicitly (Box-Muller
// on top of mt19937_64 bits) so outputs are bit-identical across standard
// library implementations.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace eitc {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derive the seed of an independent stream from (master, stage tag, counter).
inline std::uint64_t split_seed(std::uint64_t master, std::string_view stage,
                                std::uint64_t counter = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a over the stage tag
    for (unsigned char c : stage) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(master ^ splitmix64(h) ^ splitmix64(counter * 0x9e3779b97f4a7c15ULL + 1));
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] by rejection (no modulo bias).
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        const std::uint64_t span = hi - lo + 1;
        if (span == 0) return gen_(); // full range
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return lo + x % span;
    }

    /// Standard normal via Box-Muller; caches the spare draw.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    bool bernoulli(double p) { return uniform() < p; }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace eitc
