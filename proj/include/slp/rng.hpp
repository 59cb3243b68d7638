#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace slp {

// Seed handle for every randomized operation in the library. All generators
// are pure functions of (config, seed): the same seed reproduces the same
// bits on every run.
struct RngSeed {
    std::uint64_t value = 0;
};

// SplitMix64 finalizer. Bijective on 64-bit words, so distinct inputs always
// map to distinct outputs.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives an independent child seed for a numbered stream (run index, purpose
// tag, ...). For a fixed parent the map stream -> seed is injective: the
// multiplier is odd and mix64 is a bijection, so two distinct streams can
// never collide.
inline RngSeed derive_seed(RngSeed parent, std::uint64_t stream) {
    return RngSeed{mix64(parent.value ^ (0xD1B54A32D192ED03ULL * (stream + 1)))};
}

// Deterministic 64-bit generator (SplitMix64). Chosen over std::mt19937_64
// because the standard *distributions* are implementation-defined; here both
// the engine and the distributions below are pinned by this header.
class Rng {
public:
    explicit Rng(RngSeed seed) : state_(mix64(seed.value)) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_double() < p; }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            std::uint64_t x = next_u64();
            if (x >= threshold) return x % n;
        }
    }

    // Standard normal via Box-Muller. Uses two uniforms per draw; the sine
    // partner is discarded so each call consumes a fixed amount of stream.
    double next_normal() {
        double u1;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace slp
