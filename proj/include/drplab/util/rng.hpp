#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace drplab {

// Deterministic random stream on top of mt19937_64. The uniform/normal
// draws are spelled out here (instead of std::*_distribution) so that the
// exact sequence is pinned by this file, not by the standard library build.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; always consumes exactly two uniforms.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();  // log(0) guard, astronomically rare
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection-free modulo is fine here: n is tiny next to 2^64.
        return gen_() % n;
    }

private:
    std::mt19937_64 gen_;
};

// Derives independent substreams from one master seed. Stream indices are
// fixed constants so the environment, exploration, buffer sampling, and
// weight init never share a sequence.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream) {
    // splitmix64 finalizer
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace streams {
constexpr std::uint64_t kEnv = 0;
constexpr std::uint64_t kInit = 1;
constexpr std::uint64_t kExploration = 2;
constexpr std::uint64_t kTargetNoise = 3;
constexpr std::uint64_t kBuffer = 4;
}  // namespace streams

}  // namespace drplab
