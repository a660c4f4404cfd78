#pragma once

#include <cmath>
#include <cstdint>

namespace osp {

/// SplitMix64 (Steele, Lea & Flood). Used to expand seeds and for one-shot
/// integer draws. state advances by the 64-bit golden ratio each step.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Portable deterministic generator: xoshiro256** (Blackman & Vigna), seeded
/// via SplitMix64. Every stochastic path in the library draws from this
/// generator, never from std:: distributions, so output is identical across
/// platforms and standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& s : s_) s = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Inclusive uniform integer draw by modulo; the bias is negligible for
    /// the small ranges used here.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next() % span);
    }

    /// Standard normal via Box-Muller; consumes exactly two uniforms per call.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
};

/// Order-stable per-item sub-seed: mixes (seed, index) so parallel workers
/// produce output independent of scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(seed).next() ^ SplitMix64(~index).next();
}

} // namespace osp
