#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmc/analysis.hpp"
#include "qmc/bits.hpp"
#include "qmc/code.hpp"
#include "qmc/errors.hpp"
#include "qmc/fingerprint.hpp"
#include "qmc/random.hpp"

namespace qmc {

/// The unreliable m-bit store. Reads and summary fetches made by the checker
/// are counted; the adversary's accessors are not.
class PublicMemory {
public:
    explicit PublicMemory(std::size_t m) : bits_(m, 0) {
        if (m == 0) throw ShapeError("PublicMemory: length must be >= 1");
    }

    std::size_t size() const noexcept { return bits_.size(); }
    bool initialized() const noexcept { return initialized_; }

    /// Checker write of a full codeword.
    void write(const Codeword& word) {
        if (word.size() != bits_.size()) throw ShapeError("PublicMemory::write: codeword length mismatch");
        std::copy(word.bits().begin(), word.bits().end(), bits_.begin());
        initialized_ = true;
    }

    /// One logged bit query.
    Bit read_bit(std::size_t pos) {
        if (pos >= bits_.size()) throw IndexError("PublicMemory::read_bit: position " + std::to_string(pos));
        ++read_log_;
        return bits_[pos];
    }

    /// One logged summary state of the current contents.
    Fingerprint fetch_summary() {
        ++summary_log_;
        return Fingerprint(bits_);
    }

    std::uint64_t read_log() const noexcept { return read_log_; }
    std::uint64_t summary_log() const noexcept { return summary_log_; }

    // Unlogged access for the adversary and for inspection.
    std::span<const Bit> contents() const noexcept { return bits_; }
    void flip(std::size_t pos) {
        if (pos >= bits_.size()) throw IndexError("PublicMemory::flip: position " + std::to_string(pos));
        bits_[pos] ^= 1U;
    }
    void overwrite(std::span<const Bit> word) {
        if (word.size() != bits_.size()) throw ShapeError("PublicMemory::overwrite: length mismatch");
        std::copy(word.begin(), word.end(), bits_.begin());
    }

private:
    std::vector<Bit> bits_;
    bool initialized_ = false;
    std::uint64_t read_log_ = 0;
    std::uint64_t summary_log_ = 0;
};

/// Checker reply: a data bit, or the declaration that memory is buggy.
class Verdict {
public:
    static Verdict answer(Bit bit) { return Verdict(static_cast<Bit>(bit & 1U)); }
    static Verdict buggy() { return Verdict(std::nullopt); }

    bool is_buggy() const noexcept { return !bit_.has_value(); }
    Bit bit() const {
        if (!bit_) throw std::logic_error("Verdict::bit: verdict is Buggy");
        return *bit_;
    }

    friend bool operator==(const Verdict&, const Verdict&) = default;

private:
    explicit Verdict(std::optional<Bit> bit) : bit_(bit) {}
    std::optional<Bit> bit_;
};

/// What one store or retrieve did to the public memory.
struct OperationLog {
    std::uint64_t summaries_fetched = 0;
    std::uint64_t bits_read = 0;
    std::vector<SwapOutcome> outcomes;
    bool verification_skipped = false;
};

struct ComplexityReport {
    /// k * ceil(log2 m): qubits of private memory.
    std::uint64_t s_qubits = 0;
    /// Summary qubits plus bit queries served during one retrieve.
    std::uint64_t t_qubits_per_retrieve = 0;
};

/// ceil(log2 m); qubits needed to hold one fingerprint of length m.
inline std::uint64_t fingerprint_qubits(std::size_t m) {
    if (m == 0) throw DomainError("fingerprint_qubits: m must be >= 1");
    return static_cast<std::uint64_t>(std::bit_width(m - 1));
}

/// Copies needed so that (1 - 2 delta + 2 delta^2)^k <= epsilon:
/// k = ceil(log epsilon / log(1 - 2 delta + 2 delta^2)).
inline std::size_t required_k(double epsilon, double delta) {
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw DomainError("required_k: epsilon must be in (0, 1/2)");
    if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("required_k: delta must be in (0, 1]");
    const double base = p_single(delta);
    if (!(base < 1.0)) {
        throw DomainError("required_k: delta = " + std::to_string(delta) + " gives a per-copy accept probability of 1");
    }
    const double ratio = std::log2(epsilon) / std::log2(base);
    // Snap ratios that are integers up to rounding noise, e.g. log 0.25 / log 0.5.
    const double nearest = std::round(ratio);
    const double k = (std::abs(ratio - nearest) <= 1e-12 * std::max(1.0, nearest)) ? nearest : std::ceil(ratio);
    return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

/// Online memory checker holding k fingerprint copies of the last stored
/// codeword. One instance plus one PublicMemory form a sequential session.
template <LocallyDecodableCode Code>
class MemoryChecker {
public:
    MemoryChecker(Code code, std::size_t k, double epsilon) : code_(std::move(code)), k_(k), epsilon_(epsilon) {
        if (k_ < 1) throw DomainError("MemoryChecker: k must be >= 1");
        if (!(epsilon_ > 0.0 && epsilon_ < 0.5)) throw DomainError("MemoryChecker: epsilon must be in (0, 1/2)");
    }

    /// k chosen by required_k from epsilon and the code's distance.
    static MemoryChecker with_auto_k(Code code, double epsilon) {
        const std::size_t k = required_k(epsilon, code.params().delta);
        return MemoryChecker(std::move(code), k, epsilon);
    }

    const Code& code() const noexcept { return code_; }
    std::size_t k() const noexcept { return k_; }
    double epsilon() const noexcept { return epsilon_; }
    bool initialized() const noexcept { return !stored_.empty(); }
    std::span<const Fingerprint> stored_fingerprints() const noexcept { return stored_; }
    const OperationLog& last_log() const noexcept { return last_log_; }

    /// Store protocol. Verifies the current memory (skipped on the first
    /// store), then writes E(msg) and keeps k fingerprints of it. Returns
    /// Answer(1) as acknowledgment, or Buggy with state and memory untouched.
    Verdict store(PublicMemory& memory, const Message& msg, Rng& rng) {
        check_memory(memory);
        Codeword word = code_.encode(msg);
        last_log_ = OperationLog{};
        const auto reads0 = memory.read_log();
        const auto summaries0 = memory.summary_log();

        bool ok = true;
        if (initialized()) {
            ok = verify(memory, rng);
        } else {
            last_log_.verification_skipped = true;
        }
        if (ok) {
            memory.write(word);
            stored_.assign(k_, make_fingerprint(word));
        }
        finish_log(memory, reads0, summaries0);
        return ok ? Verdict::answer(1) : Verdict::buggy();
    }

    /// Retrieve protocol for bit `j` (0-based): k SWAP tests, one local
    /// decode, then refresh of the private fingerprints from k new summaries.
    Verdict retrieve(PublicMemory& memory, std::size_t j, Rng& rng) {
        check_memory(memory);
        if (j >= code_.params().n) {
            throw IndexError("retrieve: bit index " + std::to_string(j) + " not in [0, " +
                             std::to_string(code_.params().n) + ")");
        }
        if (!initialized()) throw std::logic_error("retrieve: no prior store");
        last_log_ = OperationLog{};
        const auto reads0 = memory.read_log();
        const auto summaries0 = memory.summary_log();

        if (!verify(memory, rng)) {
            finish_log(memory, reads0, summaries0);
            return Verdict::buggy();
        }

        const QueryPlan plan = code_.decode_query_plan(j, rng);
        std::vector<Bit> answers;
        answers.reserve(plan.size());
        for (std::size_t pos : plan.positions) answers.push_back(memory.read_bit(pos));
        const Bit bit = code_.decode_from_answers(j, plan, answers);

        // Tested copies are consumed; take k fresh ones.
        for (auto& fp : stored_) fp = memory.fetch_summary();

        finish_log(memory, reads0, summaries0);
        return Verdict::answer(bit);
    }

    /// s from the private memory size, t from what `retrieve_log` consumed.
    ComplexityReport complexity_report(const OperationLog& retrieve_log) const {
        const std::uint64_t per_state = fingerprint_qubits(code_.params().m);
        ComplexityReport r;
        r.s_qubits = static_cast<std::uint64_t>(k_) * per_state;
        r.t_qubits_per_retrieve = retrieve_log.summaries_fetched * per_state + retrieve_log.bits_read;
        return r;
    }

private:
    void check_memory(const PublicMemory& memory) const {
        if (memory.size() != code_.params().m) {
            throw ShapeError("MemoryChecker: memory has " + std::to_string(memory.size()) + " bits, code length is " +
                             std::to_string(code_.params().m));
        }
    }

    /// Fetches k summaries and tests summary i against stored copy i. All k
    /// tests are sampled; any outcome 1 fails.
    bool verify(PublicMemory& memory, Rng& rng) {
        bool ok = true;
        last_log_.outcomes.reserve(k_);
        for (std::size_t i = 0; i < k_; ++i) {
            const Fingerprint summary = memory.fetch_summary();
            const SwapOutcome out = sample_swap_test(stored_[i], summary, rng);
            last_log_.outcomes.push_back(out);
            if (out == SwapOutcome::One) ok = false;
        }
        return ok;
    }

    void finish_log(const PublicMemory& memory, std::uint64_t reads0, std::uint64_t summaries0) {
        last_log_.bits_read = memory.read_log() - reads0;
        last_log_.summaries_fetched = memory.summary_log() - summaries0;
    }

    Code code_;
    std::size_t k_;
    double epsilon_;
    std::vector<Fingerprint> stored_;
    OperationLog last_log_;
};

}  // namespace qmc
