#pragma once

#include <bit>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qmc/bits.hpp"
#include "qmc/errors.hpp"
#include "qmc/random.hpp"

namespace qmc {

/// Parameters of a (q, delta, eps)-locally decodable code.
///
/// `delta` is the relative minimum distance of the code. `delta_dec` is the
/// corruption radius (as a fraction of m) under which the local decoder is
/// guaranteed to return the right bit with probability >= 1/2 + eps_dec.
struct CodeParams {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t q = 0;
    double delta = 0.0;
    double delta_dec = 0.0;
    double eps_dec = 0.0;

    void validate() const {
        if (n < 1) throw DomainError("CodeParams: n must be >= 1");
        if (m < n) throw DomainError("CodeParams: m must be >= n");
        if (q < 1) throw DomainError("CodeParams: q must be >= 1");
        if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("CodeParams: delta must be in (0, 1]");
        if (!(delta_dec >= 0.0 && delta_dec < delta / 2.0)) {
            throw DomainError("CodeParams: delta_dec must be in [0, delta/2)");
        }
        if (!(eps_dec > 0.0 && eps_dec <= 0.5)) throw DomainError("CodeParams: eps_dec must be in (0, 1/2]");
    }

    friend bool operator==(const CodeParams&, const CodeParams&) = default;
};

/// Codeword positions a local decoder will read, in read order.
struct QueryPlan {
    std::vector<std::size_t> positions;

    std::size_t size() const noexcept { return positions.size(); }
    friend bool operator==(const QueryPlan&, const QueryPlan&) = default;
};

/// What the checker needs from a code. Bit indices `j` are 0-based.
template <class C>
concept LocallyDecodableCode = requires(const C& code, const Message& msg, std::size_t j, Rng& rng,
                                        const QueryPlan& plan, std::span<const Bit> answers) {
    { code.params() } -> std::convertible_to<CodeParams>;
    { code.encode(msg) } -> std::same_as<Codeword>;
    { code.decode_query_plan(j, rng) } -> std::same_as<QueryPlan>;
    { code.decode_from_answers(j, plan, answers) } -> std::same_as<Bit>;
};

/// Hadamard code: E(x)_a = <x, a> mod 2 for every mask a in {0,1}^n.
///
/// Message bit j (0-based, first character of the string form) has weight
/// 2^(n-1-j) in the integer form of x and of a mask, so codeword position a
/// is the integer whose binary expansion, most significant bit first, is the
/// mask. The two-query decoder picks a uniform mask a and returns
/// E_a xor E_{a xor e_j}; with at most delta_dec*m corrupted positions it
/// fails with probability at most 2*delta_dec.
class HadamardCode {
public:
    static constexpr std::size_t kMaxMessageBits = 24;
    static constexpr double kDefaultDecodingRadius = 1.0 / 8.0;

    explicit HadamardCode(std::size_t n, double delta_dec = kDefaultDecodingRadius) {
        if (n < 1 || n > kMaxMessageBits) {
            throw DomainError("HadamardCode: n must be in [1, " + std::to_string(kMaxMessageBits) + "]");
        }
        params_.n = n;
        params_.m = std::size_t{1} << n;
        params_.q = 2;
        params_.delta = 0.5;
        params_.delta_dec = delta_dec;
        params_.eps_dec = 0.5 - 2.0 * delta_dec;
        params_.validate();
    }

    const CodeParams& params() const noexcept { return params_; }
    std::size_t message_bits() const noexcept { return params_.n; }
    std::size_t length() const noexcept { return params_.m; }

    /// Unit mask e_j as a codeword position offset.
    std::size_t unit_mask(std::size_t j) const {
        check_index(j);
        return std::size_t{1} << (params_.n - 1 - j);
    }

    /// Integer form of a message, bit 0 most significant.
    std::uint64_t to_integer(const Message& msg) const {
        check_message(msg);
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < msg.size(); ++i) v = (v << 1) | msg[i];
        return v;
    }

    Message from_integer(std::uint64_t value) const {
        Message msg(params_.n);
        for (std::size_t i = 0; i < params_.n; ++i) msg.set(i, static_cast<Bit>((value >> (params_.n - 1 - i)) & 1U));
        return msg;
    }

    Codeword encode(const Message& msg) const {
        const std::uint64_t x = to_integer(msg);
        std::vector<Bit> out(params_.m);
        for (std::size_t a = 0; a < params_.m; ++a) {
            out[a] = static_cast<Bit>(std::popcount(x & a) & 1);
        }
        return Codeword(std::move(out));
    }

    /// Plan for an explicit mask; the randomized plan below draws the mask.
    QueryPlan plan_for_mask(std::size_t j, std::size_t mask) const {
        check_index(j);
        if (mask >= params_.m) throw IndexError("HadamardCode: mask out of range");
        return QueryPlan{{mask, mask ^ unit_mask(j)}};
    }

    QueryPlan decode_query_plan(std::size_t j, Rng& rng) const {
        check_index(j);
        return plan_for_mask(j, static_cast<std::size_t>(uniform_below(rng, params_.m)));
    }

    Bit decode_from_answers(std::size_t j, const QueryPlan& plan, std::span<const Bit> answers) const {
        check_index(j);
        if (plan.size() != answers.size()) {
            throw ShapeError("decode_from_answers: " + std::to_string(answers.size()) + " answers for a " +
                             std::to_string(plan.size()) + "-position plan");
        }
        if (plan.size() != params_.q) throw ShapeError("decode_from_answers: Hadamard plans read exactly 2 positions");
        if (plan.positions[0] >= params_.m || (plan.positions[0] ^ plan.positions[1]) != unit_mask(j)) {
            throw ShapeError("decode_from_answers: plan does not target bit " + std::to_string(j));
        }
        return static_cast<Bit>((answers[0] ^ answers[1]) & 1U);
    }

private:
    void check_index(std::size_t j) const {
        if (j >= params_.n) {
            throw IndexError("HadamardCode: bit index " + std::to_string(j) + " not in [0, " +
                             std::to_string(params_.n) + ")");
        }
    }
    void check_message(const Message& msg) const {
        if (msg.size() != params_.n) {
            throw ShapeError("HadamardCode: message has " + std::to_string(msg.size()) + " bits, expected " +
                             std::to_string(params_.n));
        }
    }

    CodeParams params_;
};

static_assert(LocallyDecodableCode<HadamardCode>);

}  // namespace qmc
