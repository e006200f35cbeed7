#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qmc/bits.hpp"
#include "qmc/errors.hpp"
#include "qmc/random.hpp"

namespace qmc {

/// Classical description of the phase state (1/sqrt m) sum_j (-1)^{y_j} |j>.
///
/// Every state the protocol touches has this form, so the phase pattern y
/// determines all overlaps exactly and no amplitudes are stored.
class Fingerprint {
public:
    explicit Fingerprint(std::span<const Bit> phases) : phases_(phases.begin(), phases.end()) {
        if (phases_.empty()) throw ShapeError("Fingerprint: length must be >= 1");
        for (Bit b : phases_) {
            if (b > 1) throw ShapeError("Fingerprint: phases must be 0 or 1");
        }
    }

    std::size_t length() const noexcept { return phases_.size(); }
    std::span<const Bit> phases() const noexcept { return phases_; }

    /// Amplitude on basis state |j>.
    double amplitude(std::size_t j) const;

    friend bool operator==(const Fingerprint&, const Fingerprint&) = default;

private:
    std::vector<Bit> phases_;
};

inline Fingerprint make_fingerprint(std::span<const Bit> word) { return Fingerprint(word); }
inline Fingerprint make_fingerprint(const Codeword& word) { return Fingerprint(word.view()); }

/// Measured value of the control qubit in the controlled-SWAP test.
enum class SwapOutcome : std::uint8_t { Zero = 0, One = 1 };

namespace detail {
inline void require_same_length(const Fingerprint& a, const Fingerprint& b, const char* op) {
    if (a.length() != b.length()) {
        throw ShapeError(std::string(op) + ": fingerprint lengths " + std::to_string(a.length()) + " and " +
                         std::to_string(b.length()) + " differ");
    }
}
}  // namespace detail

/// <psi_a|psi_b> = (m - 2d)/m, d the Hamming distance of the phase patterns.
inline double inner_product(const Fingerprint& a, const Fingerprint& b) {
    detail::require_same_length(a, b, "inner_product");
    const auto m = static_cast<long long>(a.length());
    const auto d = static_cast<long long>(hamming_distance(a.phases(), b.phases()));
    return static_cast<double>(m - 2 * d) / static_cast<double>(m);
}

/// Probability that the controlled-SWAP test measures 0: (1 + |<a|b>|^2)/2.
inline double swap_accept_prob(const Fingerprint& a, const Fingerprint& b) {
    const double ip = inner_product(a, b);
    return 0.5 * (1.0 + ip * ip);
}

/// One run of the controlled-SWAP test on fresh copies of `a` and `b`.
/// Identical phase patterns always give Zero without touching `rng`.
inline SwapOutcome sample_swap_test(const Fingerprint& a, const Fingerprint& b, Rng& rng) {
    const double p0 = swap_accept_prob(a, b);
    if (p0 >= 1.0) return SwapOutcome::Zero;
    return bernoulli(rng, p0) ? SwapOutcome::Zero : SwapOutcome::One;
}

inline double Fingerprint::amplitude(std::size_t j) const {
    if (j >= phases_.size()) throw IndexError("Fingerprint: basis index " + std::to_string(j));
    const double norm = 1.0 / std::sqrt(static_cast<double>(phases_.size()));
    return phases_[j] ? -norm : norm;
}

}  // namespace qmc
