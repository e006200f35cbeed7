#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmc/errors.hpp"

namespace qmc {

using Bit = std::uint8_t;

/// Hamming distance between two equal-length bit sequences.
inline std::size_t hamming_distance(std::span<const Bit> a, std::span<const Bit> b) {
    if (a.size() != b.size()) {
        throw ShapeError("hamming_distance: length " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
    }
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]) ? 1 : 0;
    return d;
}

/// Fixed-length vector of bits, one byte per bit. `Tag` keeps messages,
/// codewords and raw memory contents from being mixed up by accident.
template <class Tag>
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t length) : bits_(length, 0) {}
    explicit BitVector(std::vector<Bit> bits) : bits_(std::move(bits)) {
        for (Bit b : bits_) {
            if (b > 1) throw ShapeError("BitVector: entries must be 0 or 1");
        }
    }

    /// Parses a string of '0'/'1'; the first character is bit 0.
    static BitVector from_string(std::string_view text) {
        std::vector<Bit> bits;
        bits.reserve(text.size());
        for (char c : text) {
            if (c != '0' && c != '1') {
                throw ShapeError("BitVector: invalid character '" + std::string(1, c) + "'");
            }
            bits.push_back(static_cast<Bit>(c - '0'));
        }
        return BitVector(std::move(bits));
    }

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }

    Bit operator[](std::size_t i) const { return bits_[i]; }
    Bit at(std::size_t i) const {
        if (i >= bits_.size()) throw IndexError("BitVector: index " + std::to_string(i));
        return bits_[i];
    }
    void set(std::size_t i, Bit value) {
        if (i >= bits_.size()) throw IndexError("BitVector: index " + std::to_string(i));
        bits_[i] = value & 1U;
    }
    void flip(std::size_t i) {
        if (i >= bits_.size()) throw IndexError("BitVector: index " + std::to_string(i));
        bits_[i] ^= 1U;
    }

    std::span<const Bit> view() const noexcept { return bits_; }
    const std::vector<Bit>& bits() const noexcept { return bits_; }

    std::string to_string() const {
        std::string s;
        s.reserve(bits_.size());
        for (Bit b : bits_) s.push_back(static_cast<char>('0' + b));
        return s;
    }

    std::size_t weight() const noexcept {
        std::size_t w = 0;
        for (Bit b : bits_) w += b;
        return w;
    }

    friend bool operator==(const BitVector&, const BitVector&) = default;

private:
    std::vector<Bit> bits_;
};

struct MessageTag {};
struct CodewordTag {};

/// User data x in {0,1}^n.
using Message = BitVector<MessageTag>;
/// Encoded data E(x) in {0,1}^m.
using Codeword = BitVector<CodewordTag>;

}  // namespace qmc
