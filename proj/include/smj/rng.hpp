#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace smj {

// Seeded stream of uniforms/exponentials. Uses std::mt19937_64 (output
// sequence pinned by the C++ standard) with explicit inverse-CDF transforms,
// since std::*_distribution algorithms vary across standard libraries and
// would break cross-platform reproducibility.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform on [0,1) with 53-bit resolution
    double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

    // uniform on (0,1]
    double uniform_pos() { return double((gen_() >> 11) + 1) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

private:
    std::mt19937_64 gen_;
};

// splitmix64 finalizer; derives independent per-worker stream seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace smj
