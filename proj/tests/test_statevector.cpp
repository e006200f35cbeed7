#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "qmc/statevector.hpp"

using namespace qmc;

namespace {
Fingerprint fp(const std::string& s) { return make_fingerprint(Codeword::from_string(s)); }
}  // namespace

TEST(StateVector, HadamardTwiceIsIdentity) {
    StateVector sv(3);
    sv.apply_hadamard(1);
    EXPECT_NEAR(sv.probability_zero(1), 0.5, 1e-15);
    sv.apply_hadamard(1);
    EXPECT_NEAR(std::abs(sv.amplitudes()[0] - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(sv.norm_squared(), 1.0, 1e-15);
}

TEST(StateVector, FredkinOnlyActsWhenControlSet) {
    StateVector sv(3);
    auto amps = sv.amplitudes();
    // |q2 q1 q0> = |0 1 0>: control q0 clear, nothing moves.
    amps[0] = 0.0;
    amps[0b010] = 1.0;
    sv.apply_controlled_swap(0, 1, 2);
    EXPECT_EQ(sv.amplitudes()[0b010], StateVector::Amplitude(1.0));
    // |0 1 1>: control set, q1 and q2 exchange -> |1 0 1>.
    amps[0b010] = 0.0;
    amps[0b011] = 1.0;
    sv.apply_controlled_swap(0, 1, 2);
    EXPECT_EQ(sv.amplitudes()[0b101], StateVector::Amplitude(1.0));
    EXPECT_EQ(sv.amplitudes()[0b011], StateVector::Amplitude(0.0));
    EXPECT_THROW(sv.apply_controlled_swap(0, 0, 1), DomainError);
    EXPECT_THROW(sv.apply_hadamard(3), IndexError);
}

TEST(CswapOracle, IdenticalStatesMeasureZero) {
    EXPECT_NEAR(cswap_statevector_prob(fp("0110"), fp("0110")), 1.0, 1e-12);
}

TEST(CswapOracle, KnownDistances) {
    EXPECT_NEAR(cswap_statevector_prob(fp("00000000"), fp("11000000")), 0.625, 1e-12);
    EXPECT_NEAR(cswap_statevector_prob(fp("00000000"), fp("11110000")), 0.5, 1e-12);
    // Global phase flip: |<a|b>| = 1.
    EXPECT_NEAR(cswap_statevector_prob(fp("00000000"), fp("11111111")), 1.0, 1e-12);
}

TEST(CswapOracle, RejectsUnsupportedLengths) {
    EXPECT_THROW(cswap_statevector_prob(fp("000"), fp("000")), DomainError);
    const std::string big(128, '0');
    EXPECT_THROW(cswap_statevector_prob(fp(big), fp(big)), DomainError);
    EXPECT_THROW(cswap_statevector_prob(fp("00"), fp("0000")), ShapeError);
}

TEST(CswapOracle, MatchesClosedFormOnRandomPairs) {
    const std::array<std::size_t, 6> lengths{1, 2, 4, 8, 16, 32};
    const auto rep = cross_validate_swap_test(lengths, 50, 123);
    EXPECT_EQ(rep.comparisons, 300u);
    EXPECT_LE(rep.max_abs_diff, 1e-10);
    EXPECT_TRUE(rep.pass());
}

TEST(CswapOracle, LargestSupportedLength) {
    std::string a(64, '0'), b(64, '0');
    for (int i = 0; i < 16; ++i) b[i * 3] = '1';
    EXPECT_NEAR(cswap_statevector_prob(fp(a), fp(b)), swap_accept_prob(fp(a), fp(b)), 1e-10);
}
