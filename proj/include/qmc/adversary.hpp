#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "qmc/bits.hpp"
#include "qmc/checker.hpp"
#include "qmc/code.hpp"
#include "qmc/errors.hpp"
#include "qmc/random.hpp"

namespace qmc {

/// How fresh flip positions are chosen.
enum class PositionPolicy {
    /// Uniform over positions not flipped earlier in the run.
    Uniform,
    /// Lowest-numbered unflipped positions first; for reproducible tests.
    Prefix,
};

namespace attack {
struct NoOp {
    friend bool operator==(const NoOp&, const NoOp&) = default;
};
/// Overwrite the memory with E(target) at the first step.
struct SubstituteCodeword {
    Message target;
    friend bool operator==(const SubstituteCodeword&, const SubstituteCodeword&) = default;
};
/// Flip `bits_per_step` fresh positions at every step.
struct FlipCount {
    std::size_t bits_per_step = 0;
    friend bool operator==(const FlipCount&, const FlipCount&) = default;
};
/// Flip round(deltas[i] * m) fresh positions at step i.
struct Incremental {
    std::vector<double> deltas;
    friend bool operator==(const Incremental&, const Incremental&) = default;
};
}  // namespace attack

/// A scripted corruption run of `steps` steps. One step executes between
/// consecutive user operations.
struct AttackSchedule {
    using Kind = std::variant<attack::NoOp, attack::SubstituteCodeword, attack::FlipCount, attack::Incremental>;

    Kind kind = attack::NoOp{};
    std::size_t steps = 0;
    PositionPolicy policy = PositionPolicy::Uniform;

    static AttackSchedule noop(std::size_t steps) { return {attack::NoOp{}, steps, PositionPolicy::Uniform}; }
    static AttackSchedule substitute(Message target, std::size_t steps = 1) {
        return {attack::SubstituteCodeword{std::move(target)}, steps, PositionPolicy::Uniform};
    }
    static AttackSchedule flip_count(std::size_t bits_per_step, std::size_t steps,
                                     PositionPolicy policy = PositionPolicy::Uniform) {
        return {attack::FlipCount{bits_per_step}, steps, policy};
    }
    static AttackSchedule incremental(std::vector<double> deltas, PositionPolicy policy = PositionPolicy::Uniform) {
        const std::size_t t = deltas.size();
        return {attack::Incremental{std::move(deltas)}, t, policy};
    }

    bool is_incremental() const noexcept { return std::holds_alternative<attack::Incremental>(kind); }

    friend bool operator==(const AttackSchedule&, const AttackSchedule&) = default;
};

/// Whole bits flipped at each step of an Incremental schedule: round(D_i m).
inline std::vector<std::size_t> incremental_flip_counts(const attack::Incremental& inc, std::size_t m) {
    std::vector<std::size_t> counts;
    counts.reserve(inc.deltas.size());
    for (double d : inc.deltas) {
        if (!(d >= 0.0)) throw DomainError("incremental schedule: fractions must be >= 0");
        counts.push_back(static_cast<std::size_t>(std::llround(d * static_cast<double>(m))));
    }
    return counts;
}

/// Throws ValidationError (field path under `prefix`) if `schedule` cannot
/// run against an m-bit memory.
inline void validate_schedule(const AttackSchedule& schedule, std::size_t m, std::size_t message_bits,
                              const std::string& prefix = "attack") {
    if (const auto* inc = std::get_if<attack::Incremental>(&schedule.kind)) {
        if (schedule.steps != inc->deltas.size()) {
            throw ValidationError(prefix + ".steps", "must equal the number of deltas");
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < inc->deltas.size(); ++i) {
            const double d = inc->deltas[i];
            if (!(d >= 0.0 && d <= 1.0)) {
                throw ValidationError(prefix + ".deltas[" + std::to_string(i) + "]", "must be in [0, 1]");
            }
            sum += d;
        }
        if (sum > 1.0 + 1e-12) throw ValidationError(prefix + ".deltas", "sum must be <= 1");
        const auto counts = incremental_flip_counts(*inc, m);
        if (std::accumulate(counts.begin(), counts.end(), std::size_t{0}) > m) {
            throw ValidationError(prefix + ".deltas", "rounded flip counts exceed the memory length");
        }
    } else if (const auto* fc = std::get_if<attack::FlipCount>(&schedule.kind)) {
        if (fc->bits_per_step * schedule.steps > m) {
            throw ValidationError(prefix + ".bits_per_step", "total flips exceed the memory length");
        }
    } else if (const auto* sub = std::get_if<attack::SubstituteCodeword>(&schedule.kind)) {
        if (sub->target.size() != message_bits) {
            throw ValidationError(prefix + ".target", "must have " + std::to_string(message_bits) + " bits");
        }
        if (schedule.steps < 1) throw ValidationError(prefix + ".steps", "must be >= 1");
    }
}

/// True iff sum_i round(D_i m) >= delta m, i.e. the schedule flips enough
/// bits to reach another codeword.
inline bool codeword_reachability_check(const AttackSchedule& schedule, const CodeParams& params) {
    const auto* inc = std::get_if<attack::Incremental>(&schedule.kind);
    if (!inc) throw DomainError("codeword_reachability_check: schedule is not Incremental");
    const auto counts = incremental_flip_counts(*inc, params.m);
    const auto total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    return static_cast<double>(total) >= params.delta * static_cast<double>(params.m);
}

struct AdversaryLog {
    std::size_t m = 0;
    /// Positions changed at each executed step.
    std::vector<std::vector<std::size_t>> steps;
    /// Size of the union of all changed positions.
    std::size_t distinct_flipped = 0;

    double cumulative_distance() const {
        return m == 0 ? 0.0 : static_cast<double>(distinct_flipped) / static_cast<double>(m);
    }
};

/// Executes one AttackSchedule against one session's memory. The memory
/// contents at the first step are the reference for distance bookkeeping.
class Adversary {
public:
    template <LocallyDecodableCode Code>
    Adversary(AttackSchedule schedule, const Code& code) : schedule_(std::move(schedule)) {
        const CodeParams& p = code.params();
        validate_schedule(schedule_, p.m, p.n);
        if (const auto* sub = std::get_if<attack::SubstituteCodeword>(&schedule_.kind)) {
            substitute_word_ = code.encode(sub->target);
        }
        if (const auto* inc = std::get_if<attack::Incremental>(&schedule_.kind)) {
            incremental_counts_ = incremental_flip_counts(*inc, p.m);
        }
        flipped_.assign(p.m, 0);
        unflipped_.resize(p.m);
        std::iota(unflipped_.begin(), unflipped_.end(), std::size_t{0});
        log_.m = p.m;
    }

    const AttackSchedule& schedule() const noexcept { return schedule_; }
    const AdversaryLog& log() const noexcept { return log_; }
    std::size_t steps_done() const noexcept { return log_.steps.size(); }

    /// Runs step `step` (0-based). Steps must be applied in order.
    const std::vector<std::size_t>& apply_step(std::size_t step, PublicMemory& memory, Rng& rng) {
        if (step >= schedule_.steps) {
            throw IndexError("Adversary::apply_step: step " + std::to_string(step) + " beyond schedule of " +
                             std::to_string(schedule_.steps));
        }
        if (step != steps_done()) throw std::logic_error("Adversary::apply_step: steps must run in order");
        if (memory.size() != flipped_.size()) throw ShapeError("Adversary::apply_step: memory length mismatch");
        if (!memory.initialized()) throw std::logic_error("Adversary::apply_step: memory not initialized");

        std::vector<std::size_t> changed;
        std::visit(
            [&](const auto& kind) {
                using K = std::decay_t<decltype(kind)>;
                if constexpr (std::is_same_v<K, attack::SubstituteCodeword>) {
                    if (step == 0) changed = substitute(memory);
                } else if constexpr (std::is_same_v<K, attack::FlipCount>) {
                    changed = flip_fresh(kind.bits_per_step, memory, rng);
                } else if constexpr (std::is_same_v<K, attack::Incremental>) {
                    changed = flip_fresh(incremental_counts_[step], memory, rng);
                }
            },
            schedule_.kind);
        log_.steps.push_back(std::move(changed));
        return log_.steps.back();
    }

private:
    std::vector<std::size_t> substitute(PublicMemory& memory) {
        std::vector<std::size_t> changed;
        const auto current = memory.contents();
        for (std::size_t i = 0; i < current.size(); ++i) {
            if (current[i] != (*substitute_word_)[i]) changed.push_back(i);
        }
        memory.overwrite(substitute_word_->view());
        for (std::size_t pos : changed) {
            mark(pos);
            std::erase(unflipped_, pos);
        }
        return changed;
    }

    std::vector<std::size_t> flip_fresh(std::size_t count, PublicMemory& memory, Rng& rng) {
        if (count > unflipped_.size()) {
            throw DomainError("Adversary: step needs " + std::to_string(count) + " fresh positions, " +
                              std::to_string(unflipped_.size()) + " remain");
        }
        std::vector<std::size_t> picked;
        picked.reserve(count);
        if (schedule_.policy == PositionPolicy::Prefix) {
            for (std::size_t pos = 0; pos < flipped_.size() && picked.size() < count; ++pos) {
                if (!flipped_[pos]) picked.push_back(pos);
            }
            for (std::size_t pos : picked) std::erase(unflipped_, pos);
        } else {
            for (std::size_t t = 0; t < count; ++t) {
                const auto r = static_cast<std::size_t>(uniform_below(rng, unflipped_.size()));
                picked.push_back(unflipped_[r]);
                std::swap(unflipped_[r], unflipped_.back());
                unflipped_.pop_back();
            }
        }
        for (std::size_t pos : picked) {
            memory.flip(pos);
            mark(pos);
        }
        return picked;
    }

    void mark(std::size_t pos) {
        if (flipped_[pos]) return;
        flipped_[pos] = 1;
        ++log_.distinct_flipped;
    }

    AttackSchedule schedule_;
    std::optional<Codeword> substitute_word_;
    std::vector<std::size_t> incremental_counts_;
    std::vector<Bit> flipped_;
    std::vector<std::size_t> unflipped_;
    AdversaryLog log_;
};

}  // namespace qmc
