#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qmc/analysis.hpp"
#include "qmc/fingerprint.hpp"
#include "qmc/statevector.hpp"

using namespace qmc;

TEST(PSingle, Examples) {
    EXPECT_DOUBLE_EQ(p_single(0.0), 1.0);
    EXPECT_DOUBLE_EQ(p_single(0.5), 0.5);
    EXPECT_DOUBLE_EQ(p_single(1.0), 1.0);
    EXPECT_THROW(p_single(-0.1), DomainError);
    EXPECT_THROW(p_single(1.1), DomainError);
}

TEST(PSingle, FullComplementMatchesStatevector) {
    const auto a = make_fingerprint(Codeword::from_string("01011010"));
    const auto b = make_fingerprint(Codeword::from_string("10100101"));
    EXPECT_NEAR(cswap_statevector_prob(a, b), p_single(1.0), 1e-12);
}

// p_single(d/m) is the SWAP-test accept probability at distance d, m = 8, 16.
TEST(PSingle, EqualsSwapAcceptProbAtEveryDistance) {
    for (std::size_t m : {8u, 16u}) {
        for (std::size_t d = 0; d <= m; ++d) {
            std::vector<Bit> a(m, 0), b(m, 0);
            for (std::size_t i = 0; i < d; ++i) b[i] = 1;
            const double p = swap_accept_prob(Fingerprint(a), Fingerprint(b));
            ASSERT_NEAR(p_single(double(d) / double(m)), p, 1e-15) << m << ' ' << d;
        }
    }
}

TEST(PMulti, Examples) {
    const std::vector<double> two{0.25, 0.25};
    EXPECT_DOUBLE_EQ(p_multi(two), 0.390625);
    const std::vector<double> one{0.3};
    EXPECT_DOUBLE_EQ(p_multi(one), p_single(0.3));
    EXPECT_DOUBLE_EQ(p_multi(std::vector<double>{}), 1.0);
    EXPECT_THROW(p_multi(std::vector<double>{0.6, 0.6}), DomainError);
    EXPECT_THROW(p_multi(std::vector<double>{-0.1}), DomainError);
}

TEST(Lemma1Bound, Examples) {
    EXPECT_DOUBLE_EQ(lemma1_bound(0.5, 7), 0.0078125);
    EXPECT_DOUBLE_EQ(lemma1_bound(0.5, 2), 0.25);
    EXPECT_DOUBLE_EQ(lemma1_bound(0.3, 1), p_single(0.3));
    EXPECT_THROW(lemma1_bound(0.5, 0), DomainError);
    EXPECT_THROW(lemma1_bound(0.0, 3), DomainError);
}

TEST(Lemma1Bound, StrictlyDecreasingInK) {
    for (double delta = 0.05; delta < 1.0; delta += 0.05) {
        for (std::size_t k = 1; k < 40; ++k) ASSERT_LT(lemma1_bound(delta, k + 1), lemma1_bound(delta, k)) << delta;
    }
}

TEST(Lemma1Bound, BaseMinimizedAtHalf) {
    for (double delta = 0.01; delta < 1.0; delta += 0.01) {
        ASSERT_GE(p_single(delta), 0.5);
        ASSERT_LT(p_single(delta), 1.0);
    }
}

TEST(VerifyLemma2, GridTwentyFourSteps) {
    const auto rep = verify_lemma2(20, 4);
    EXPECT_EQ(rep.violations, 0u);
    EXPECT_EQ(rep.identity_mismatches, 0u);
    EXPECT_TRUE(rep.pass());
    // sum over S = 0..20 of C(S+T-1, T-1) for T = 1..4 = 21 + 231 + 1771 + 10626.
    EXPECT_EQ(rep.compositions_checked, 21u + 231u + 1771u + 10626u);
    EXPECT_EQ(rep.identity_checked, 231u);
    EXPECT_DOUBLE_EQ(rep.min_margin, 0.0);  // T = 1 is equality
}

// The two-step identity as printed with "+ a(D-a)" disagrees with direct
// subtraction wherever a(D-a) != 0; the "-" form is exact.
TEST(VerifyLemma2, PrintedIdentitySignIsWrong) {
    const auto rep = verify_lemma2(20, 2);
    EXPECT_EQ(rep.identity_mismatches, 0u);
    EXPECT_GT(rep.plus_form_mismatches, 0u);
    // Pairs with a = 0 or a = D agree in both forms: 2 per D > 0, 1 at D = 0.
    EXPECT_EQ(rep.plus_form_mismatches, rep.identity_checked - (1 + 2 * 20));
}

TEST(VerifyLemma2, QuarterQuarterIdentityValue) {
    const double a = 0.25, d = 0.5;
    const double direct = p_single(d) - p_single(a) * p_single(d - a);
    EXPECT_DOUBLE_EQ(direct, 0.109375);
    EXPECT_DOUBLE_EQ(4 * a * (d - a) * (d - a * (d - a)), 0.109375);
    EXPECT_DOUBLE_EQ(4 * a * (d - a) * (d + a * (d - a)), 0.140625);
}

// Independent floating-point sweep on a finer grid.
TEST(VerifyLemma2, FineGridFloatingPoint) {
    constexpr int kR = 200;
    for (int s = 0; s <= kR; ++s) {
        for (int a = 0; a <= s; ++a) {
            const double d = double(s) / kR, x = double(a) / kR;
            ASSERT_LE(p_single(x) * p_single(d - x), p_single(d) + 1e-15);
        }
    }
}

TEST(VerifyLemma2, DomainChecks) {
    EXPECT_THROW(verify_lemma2(0, 4), DomainError);
    EXPECT_THROW(verify_lemma2(20, 1), DomainError);
    EXPECT_THROW(verify_lemma2(1u << 20, 4), DomainError);
}

TEST(BoundReport, StandardErrorAndComparisons) {
    const auto r = make_bound_report(0.5, 5100, 10000, 4.0, BoundReport::Comparison::TwoSided);
    EXPECT_DOUBLE_EQ(r.empirical, 0.51);
    EXPECT_DOUBLE_EQ(r.std_error, std::sqrt(0.51 * 0.49 / 10000));
    EXPECT_TRUE(r.pass);
    EXPECT_FALSE(make_bound_report(0.5, 5500, 10000, 4.0, BoundReport::Comparison::TwoSided).pass);
    EXPECT_TRUE(make_bound_report(0.5, 5500, 10000, 4.0, BoundReport::Comparison::AtLeast).pass);
    EXPECT_FALSE(make_bound_report(0.5, 5500, 10000, 4.0, BoundReport::Comparison::AtMost).pass);
    EXPECT_THROW(make_bound_report(0.5, 1, 0, 4.0, BoundReport::Comparison::AtMost), DomainError);
}
