#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "stylesim/version.hpp"

namespace stylesim {

// splitmix64: seed expansion and stream derivation.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// xoshiro256** seeded via splitmix64. Bit-identical on every platform, which
// is what keeps resampling outputs reproducible across machines.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64_next(sm);
    }

    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ull; }

    std::uint64_t operator()() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, n) by 128-bit multiply-shift; deterministic and without
    // the implementation-defined behavior of std::uniform_int_distribution.
    std::uint64_t bounded(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(operator()()) * n) >> 64);
    }

    // Uniform double in [0, 1) using the top 53 bits.
    double uniform() {
        return static_cast<double>(operator()() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    // Standard normal via Box-Muller on two fresh uniforms.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4]{};
};

// Derives the seed for a named analysis stream. Parallel resampling splits
// streams up front, so results match a serial run regardless of scheduling.
inline std::uint64_t derive_stream_seed(std::uint64_t root_seed,
                                        std::string_view stream_name,
                                        std::uint64_t stream_index = 0) {
    std::uint64_t s = root_seed ^ (0x6a09e667f3bcc909ull + stream_index);
    std::uint64_t mixed = splitmix64_next(s);
    return mixed ^ fnv1a64(stream_name);
}

} // namespace stylesim
