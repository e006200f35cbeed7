#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qmc/errors.hpp"

namespace qmc {

/// Probability that one SWAP test accepts after a fraction `delta_frac` of
/// the memory changed since the fingerprint was taken: 1 - 2D + 2D^2.
inline double p_single(double delta_frac) {
    if (!(delta_frac >= 0.0 && delta_frac <= 1.0)) throw DomainError("p_single: fraction must be in [0, 1]");
    return 1.0 - 2.0 * delta_frac + 2.0 * delta_frac * delta_frac;
}

/// Probability that T successive single-copy tests all accept when step i
/// flips a fresh fraction D_i of the memory: prod_i p_single(D_i).
inline double p_multi(std::span<const double> deltas) {
    double sum = 0.0;
    double p = 1.0;
    for (double d : deltas) {
        if (!(d >= 0.0)) throw DomainError("p_multi: fractions must be >= 0");
        sum += d;
        p *= p_single(d);
    }
    if (sum > 1.0 + 1e-12) throw DomainError("p_multi: fractions sum above 1");
    return p;
}

/// Upper bound on the all-accept probability of k tests against memory at
/// relative distance >= delta: (1 - 2 delta + 2 delta^2)^k.
inline double lemma1_bound(double delta, std::size_t k) {
    if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("lemma1_bound: delta must be in (0, 1]");
    if (k < 1) throw DomainError("lemma1_bound: k must be >= 1");
    return std::pow(p_single(delta), static_cast<double>(k));
}

/// Empirical rate next to its analytic counterpart.
struct BoundReport {
    enum class Comparison {
        /// |p_hat - analytic| <= sigmas * se
        TwoSided,
        /// p_hat >= analytic - sigmas * se
        AtLeast,
        /// p_hat <= analytic + sigmas * se
        AtMost,
    };

    double analytic = 0.0;
    double empirical = 0.0;
    std::uint64_t successes = 0;
    std::uint64_t samples = 0;
    double std_error = 0.0;
    double sigmas = 4.0;
    Comparison comparison = Comparison::TwoSided;
    bool pass = false;
};

/// Binomial standard error sqrt(p(1-p)/N).
inline double binomial_std_error(double p, std::uint64_t samples) {
    if (samples == 0) return 0.0;
    return std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
}

/// Compares `successes / samples` against `analytic`.
///
/// The standard error is the plug-in estimate sqrt(p_hat(1-p_hat)/N). When
/// that is zero (p_hat at 0 or 1) the analytic p is used instead so a
/// degenerate sample does not get an infinitely tight band.
inline BoundReport make_bound_report(double analytic, std::uint64_t successes, std::uint64_t samples, double sigmas,
                                     BoundReport::Comparison comparison) {
    if (samples == 0) throw DomainError("make_bound_report: no samples");
    if (successes > samples) throw DomainError("make_bound_report: successes > samples");
    BoundReport r;
    r.analytic = analytic;
    r.successes = successes;
    r.samples = samples;
    r.empirical = static_cast<double>(successes) / static_cast<double>(samples);
    r.std_error = binomial_std_error(r.empirical, samples);
    r.sigmas = sigmas;
    r.comparison = comparison;
    double band = sigmas * r.std_error;
    if (band == 0.0) band = sigmas * binomial_std_error(analytic, samples);
    switch (comparison) {
        case BoundReport::Comparison::TwoSided: r.pass = std::abs(r.empirical - analytic) <= band; break;
        case BoundReport::Comparison::AtLeast: r.pass = r.empirical >= analytic - band; break;
        case BoundReport::Comparison::AtMost: r.pass = r.empirical <= analytic + band; break;
    }
    return r;
}

/// Result of exhaustively checking P_T(D_1..D_T) <= P_1(sum D_i) on a grid.
struct Lemma2Report {
    std::uint32_t grid_denominator = 0;
    std::uint32_t max_steps = 0;
    std::uint64_t compositions_checked = 0;
    std::uint64_t violations = 0;
    /// Smallest P_1(D) - P_T over all checked compositions; 0 when T = 1 is
    /// included.
    double min_margin = 0.0;
    /// Two-step identity P_1(D) - P_2(a, D-a) = 4a(D-a)(D - a(D-a)).
    std::uint64_t identity_checked = 0;
    std::uint64_t identity_mismatches = 0;
    /// Same identity with "+ a(D-a)" in the last factor, as sometimes printed.
    /// Counts grid points where that form disagrees with direct subtraction.
    std::uint64_t plus_form_mismatches = 0;

    bool pass() const noexcept { return violations == 0 && identity_mismatches == 0; }
};

namespace detail {

using Int128 = __int128;

/// R^2 * p_single(s/R) as an exact integer.
constexpr Int128 scaled_p_single(Int128 s, Int128 r) { return r * r - 2 * s * r + 2 * s * s; }

constexpr Int128 ipow(Int128 base, unsigned e) {
    Int128 out = 1;
    while (e-- > 0) out *= base;
    return out;
}

/// Calls `visit(parts)` for every weak composition of `total` into `parts.size()` parts.
template <class Visit>
void for_each_composition(std::uint32_t total, std::vector<std::uint32_t>& parts, std::size_t pos, Visit&& visit) {
    if (pos + 1 == parts.size()) {
        parts[pos] = total;
        visit(std::span<const std::uint32_t>(parts));
        return;
    }
    for (std::uint32_t s = 0; s <= total; ++s) {
        parts[pos] = s;
        for_each_composition(total - s, parts, pos + 1, visit);
    }
}

}  // namespace detail

/// Enumerates every composition of D = S/R (S = 0..R) into T = 1..max_steps
/// nonnegative grid fractions with step 1/R and checks P_T <= P_1(D) in exact
/// integer arithmetic. Also checks the two-step algebraic identity on every
/// grid pair.
inline Lemma2Report verify_lemma2(std::uint32_t grid_denominator, std::uint32_t max_steps) {
    if (grid_denominator < 1) throw DomainError("verify_lemma2: grid denominator must be >= 1");
    if (max_steps < 2) throw DomainError("verify_lemma2: max_steps must be >= 2");
    // R^(2T) must fit comfortably in 127 bits.
    if (2.0 * max_steps * std::log2(static_cast<double>(grid_denominator)) > 120.0) {
        throw DomainError("verify_lemma2: grid too fine for exact arithmetic at this step count");
    }

    using detail::Int128;
    const Int128 r = grid_denominator;
    Lemma2Report rep;
    rep.grid_denominator = grid_denominator;
    rep.max_steps = max_steps;
    bool first = true;

    for (std::uint32_t total = 0; total <= grid_denominator; ++total) {
        const Int128 p1_scaled = detail::scaled_p_single(total, r);
        for (std::uint32_t t = 1; t <= max_steps; ++t) {
            // Everything scaled by R^(2t).
            const Int128 rhs = p1_scaled * detail::ipow(r * r, t - 1);
            std::vector<std::uint32_t> parts(t);
            detail::for_each_composition(total, parts, 0, [&](std::span<const std::uint32_t> ps) {
                Int128 lhs = 1;
                for (auto s : ps) lhs *= detail::scaled_p_single(s, r);
                ++rep.compositions_checked;
                if (lhs > rhs) ++rep.violations;
                const double margin = static_cast<double>(rhs - lhs) / static_cast<double>(detail::ipow(r * r, t));
                if (first || margin < rep.min_margin) rep.min_margin = margin;
                first = false;
            });
        }

        // Identity, scaled by R^4: P_1 - P_2 versus 4a(D-a)(D -/+ a(D-a)).
        for (std::uint32_t a = 0; a <= total; ++a) {
            const Int128 b = total - a;
            const Int128 direct = p1_scaled * r * r - detail::scaled_p_single(a, r) * detail::scaled_p_single(b, r);
            const Int128 minus_form = 4 * Int128(a) * b * (Int128(total) * r - Int128(a) * b);
            const Int128 plus_form = 4 * Int128(a) * b * (Int128(total) * r + Int128(a) * b);
            ++rep.identity_checked;
            if (direct != minus_form) ++rep.identity_mismatches;
            if (direct != plus_form) ++rep.plus_form_mismatches;
        }
    }
    return rep;
}

}  // namespace qmc
