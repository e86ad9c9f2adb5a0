#pragma once

#include <array>
#include <cstdint>

#include "gtetrad/stats.hpp"

namespace gtetrad {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output/mixing function (Steele, Lea & Flood).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct SplitMix64 {
    std::uint64_t state = 0;
    std::uint64_t next() {
        state += kGolden;
        return mix64(state);
    }
};

// Deterministic sub-stream seed for (seed, index): both inputs pass through
// the SplitMix64 mixer so distinct indices land far apart in state space.
// This is what makes serial and parallel replication runs identical.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed + kGolden * mix64(index + kGolden));
}

// xoshiro256++ (Blackman & Vigna), seeded through SplitMix64. Normal
// variates use the inverse-CDF method (AS241 quantile) on a uniform placed
// strictly inside (0, 1); the generator is therefore bit-reproducible for a
// fixed build.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) {
        SplitMix64 sm{seed};
        for (auto& word : state_) word = sm.next();
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on the open interval (0, 1): 53-bit mantissa plus a half-ulp
    // offset, so the normal quantile below never sees an endpoint.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    double normal() { return normal_quantile(uniform01()); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> state_{};
};

}  // namespace gtetrad
