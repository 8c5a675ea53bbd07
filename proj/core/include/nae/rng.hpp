#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace nae {

// Deterministic, platform-independent randomness. Every stochastic stage of
// the pipeline owns an Rng seeded through derive_stream(), so reruns with the
// same seed reproduce results bit-for-bit. std::* distributions are avoided
// on purpose: their output is not specified across standard libraries.

inline constexpr uint64_t kGolden64 = 0x9e3779b97f4a7c15ull;

/// SplitMix64 finalizer.
inline constexpr uint64_t mix64(uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
}

/// Derives an independent substream seed from a parent seed and a path
/// component. Chain calls for tuple keys: derive_stream(derive_stream(s, a), b).
inline constexpr uint64_t derive_stream(uint64_t seed, uint64_t component) noexcept {
    return mix64(seed + kGolden64 * (component + 1));
}

inline constexpr uint64_t derive_stream(uint64_t seed, uint64_t a, uint64_t b) noexcept {
    return derive_stream(derive_stream(seed, a), b);
}

inline constexpr uint64_t derive_stream(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) noexcept {
    return derive_stream(derive_stream(seed, a, b), c);
}

// Substream tags. Keeping them distinct prevents accidental stream reuse
// between pipeline stages sharing one global seed.
namespace stream {
inline constexpr uint64_t kScene = 0x5c;
inline constexpr uint64_t kTrainImage = 0x71;
inline constexpr uint64_t kInit = 0x19;
inline constexpr uint64_t kBatchNoise = 0x2e;
inline constexpr uint64_t kOrder = 0x07;
inline constexpr uint64_t kHoldout = 0x66;
inline constexpr uint64_t kJitter = 0x4a;
}  // namespace stream

/// xoshiro256++ generator with SplitMix64 state expansion.
class Rng {
public:
    explicit Rng(uint64_t seed) noexcept {
        uint64_t sm = seed;
        for (auto& w : state_) {
            sm += kGolden64;
            w = mix64(sm);
        }
    }

    uint64_t next() noexcept {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double u01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * u01(); }

    /// Uniform angle in [0, 2*pi).
    double angle() noexcept { return 2.0 * std::numbers::pi * u01(); }

    /// Uniform integer in [lo, hi] inclusive. Requires lo <= hi.
    int64_t uniform_int(int64_t lo, int64_t hi) noexcept {
        const auto span = static_cast<double>(hi - lo + 1);
        auto v = lo + static_cast<int64_t>(u01() * span);
        return v > hi ? hi : v;
    }

    /// Standard normal via Box-Muller (no state caching; one pair per call).
    double normal() noexcept {
        const double u1 = 1.0 - u01();  // (0, 1]
        const double u2 = u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    static constexpr uint64_t rotl(uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    uint64_t state_[4];
};

}  // namespace nae
