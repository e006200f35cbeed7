#pragma once

#include <cstdint>
#include <random>

namespace qmc {

/// Engine used throughout. Its output sequence is fixed by the standard, so
/// seeded runs are reproducible across platforms. The helpers below avoid
/// the standard distributions, whose algorithms are implementation-defined.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Per-trial seed: the `trial_index`-th output of a SplitMix64 stream started
/// at `master_seed`. Injective in `trial_index` for a fixed master seed
/// (odd-increment counter followed by a bijective mix).
constexpr std::uint64_t derive_trial_seed(std::uint64_t master_seed,
                                          std::uint64_t trial_index) noexcept {
    constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
    return splitmix64_mix(master_seed + (trial_index + 1) * kGamma);
}

/// Uniform integer in [0, bound). `bound` must be nonzero.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    // Reject the partial block at the top so the modulo is unbiased.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// True with probability `p`.
inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

}  // namespace qmc
