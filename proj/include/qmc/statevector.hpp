#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qmc/errors.hpp"
#include "qmc/fingerprint.hpp"
#include "qmc/random.hpp"

namespace qmc {

/// Dense pure-state simulator for a handful of qubits. Qubit q is bit q of
/// the basis index (qubit 0 least significant).
class StateVector {
public:
    using Amplitude = std::complex<double>;

    static constexpr std::size_t kMaxQubits = 16;

    /// |0...0> on `num_qubits` qubits.
    explicit StateVector(std::size_t num_qubits) : num_qubits_(num_qubits) {
        if (num_qubits > kMaxQubits) throw DomainError("StateVector: too many qubits");
        amps_.assign(std::size_t{1} << num_qubits, Amplitude{0.0, 0.0});
        amps_[0] = 1.0;
    }

    std::size_t num_qubits() const noexcept { return num_qubits_; }
    std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
    std::span<Amplitude> amplitudes() noexcept { return amps_; }

    void apply_hadamard(std::size_t qubit) {
        check_qubit(qubit);
        const std::size_t bit = std::size_t{1} << qubit;
        const double r = 1.0 / std::sqrt(2.0);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & bit) continue;
            const Amplitude a0 = amps_[i];
            const Amplitude a1 = amps_[i | bit];
            amps_[i] = r * (a0 + a1);
            amps_[i | bit] = r * (a0 - a1);
        }
    }

    /// Fredkin gate: swaps qubits `a` and `b` when `control` is 1.
    void apply_controlled_swap(std::size_t control, std::size_t a, std::size_t b) {
        check_qubit(control);
        check_qubit(a);
        check_qubit(b);
        if (control == a || control == b || a == b) throw DomainError("controlled_swap: qubits must be distinct");
        const std::size_t c_bit = std::size_t{1} << control;
        const std::size_t a_bit = std::size_t{1} << a;
        const std::size_t b_bit = std::size_t{1} << b;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            // Visit each swapped pair once, from the (a=1, b=0) side.
            if ((i & c_bit) && (i & a_bit) && !(i & b_bit)) {
                std::swap(amps_[i], amps_[(i ^ a_bit) | b_bit]);
            }
        }
    }

    /// Probability that measuring `qubit` yields 0.
    double probability_zero(std::size_t qubit) const {
        check_qubit(qubit);
        const std::size_t bit = std::size_t{1} << qubit;
        double p = 0.0;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (!(i & bit)) p += std::norm(amps_[i]);
        }
        return p;
    }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return s;
    }

private:
    void check_qubit(std::size_t q) const {
        if (q >= num_qubits_) throw IndexError("StateVector: qubit " + std::to_string(q));
    }

    std::size_t num_qubits_;
    std::vector<Amplitude> amps_;
};

/// Largest fingerprint length the dense oracle accepts (13 qubits).
inline constexpr std::size_t kMaxOracleLength = 64;

/// Runs H, controlled-SWAP, H on |0>|psi_a>|psi_b> with a dense statevector
/// and returns the probability of reading the control as 0.
///
/// Layout: control is qubit 0, register A is qubits 1..L, register B is
/// qubits L+1..2L with L = log2(m). Independent of the closed form in
/// swap_accept_prob; intended as its oracle.
inline double cswap_statevector_prob(const Fingerprint& a, const Fingerprint& b) {
    detail::require_same_length(a, b, "cswap_statevector_prob");
    const std::size_t m = a.length();
    if (!std::has_single_bit(m)) throw DomainError("cswap_statevector_prob: m must be a power of two");
    if (m > kMaxOracleLength) throw DomainError("cswap_statevector_prob: m > 64 is too large for the dense oracle");

    const auto reg_bits = static_cast<std::size_t>(std::countr_zero(m));
    StateVector sv(1 + 2 * reg_bits);
    auto amps = sv.amplitudes();
    amps[0] = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            amps[(i << 1) | (j << (1 + reg_bits))] = a.amplitude(i) * b.amplitude(j);
        }
    }

    sv.apply_hadamard(0);
    for (std::size_t k = 0; k < reg_bits; ++k) sv.apply_controlled_swap(0, 1 + k, 1 + reg_bits + k);
    sv.apply_hadamard(0);
    return sv.probability_zero(0);
}

struct OracleCheckReport {
    std::size_t comparisons = 0;
    double max_abs_diff = 0.0;
    double tolerance = 1e-10;
    bool pass() const noexcept { return max_abs_diff <= tolerance; }
};

/// Compares swap_accept_prob with the dense circuit on `pairs` random phase
/// pairs for each length in `lengths`.
inline OracleCheckReport cross_validate_swap_test(std::span<const std::size_t> lengths, std::size_t pairs,
                                                  std::uint64_t seed, double tolerance = 1e-10) {
    OracleCheckReport rep;
    rep.tolerance = tolerance;
    Rng rng(seed);
    for (std::size_t m : lengths) {
        std::vector<Bit> a(m), b(m);
        for (std::size_t p = 0; p < pairs; ++p) {
            for (std::size_t i = 0; i < m; ++i) {
                a[i] = static_cast<Bit>(rng() >> 63);
                b[i] = static_cast<Bit>(rng() >> 63);
            }
            const Fingerprint fa(a), fb(b);
            const double diff = std::abs(cswap_statevector_prob(fa, fb) - swap_accept_prob(fa, fb));
            rep.max_abs_diff = std::max(rep.max_abs_diff, diff);
            ++rep.comparisons;
        }
    }
    return rep;
}

}  // namespace qmc
