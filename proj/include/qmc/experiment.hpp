#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmc/adversary.hpp"
#include "qmc/analysis.hpp"
#include "qmc/checker.hpp"
#include "qmc/code.hpp"
#include "qmc/config.hpp"
#include "qmc/fingerprint.hpp"
#include "qmc/random.hpp"

namespace qmc {

/// Outcome of one session.
struct TrialRecord {
    bool buggy = false;
    /// Buggy raised while the memory still held the last written codeword.
    bool false_buggy = false;
    std::size_t retrieves_accepted = 0;
    std::size_t wrong_answers = 0;
    std::uint64_t max_summaries_per_retrieve = 0;
    std::uint64_t max_bits_per_retrieve = 0;
    std::optional<ComplexityReport> complexity;
    /// Verdict stream: "S" store ack, "S!" store buggy, "R<j>=<b>" retrieve
    /// answer, "R<j>!" retrieve buggy, "A" attack step.
    std::vector<std::string> events;
};

/// Counters summed over trials. Addition is commutative, so merge order
/// does not change the result.
struct Aggregates {
    std::uint64_t trials = 0;
    std::uint64_t correct_sessions = 0;
    std::uint64_t buggy_sessions = 0;
    std::uint64_t false_buggy_sessions = 0;
    /// No Buggy, but at least one wrong answer.
    std::uint64_t undetected_wrong_sessions = 0;
    std::uint64_t retrieves_accepted = 0;
    std::uint64_t wrong_answers = 0;
    /// accepted_through[r]: sessions whose first r+1 retrieves all accepted.
    std::vector<std::uint64_t> accepted_through;
    std::uint64_t max_summaries_per_retrieve = 0;
    std::uint64_t max_bits_per_retrieve = 0;
    std::uint64_t s_qubits = 0;
    std::uint64_t max_t_qubits_per_retrieve = 0;

    void add(const TrialRecord& t) {
        ++trials;
        const bool correct = !t.buggy && t.wrong_answers == 0;
        correct_sessions += correct ? 1 : 0;
        buggy_sessions += t.buggy ? 1 : 0;
        false_buggy_sessions += t.false_buggy ? 1 : 0;
        undetected_wrong_sessions += (!t.buggy && t.wrong_answers > 0) ? 1 : 0;
        retrieves_accepted += t.retrieves_accepted;
        wrong_answers += t.wrong_answers;
        if (accepted_through.size() < t.retrieves_accepted) accepted_through.resize(t.retrieves_accepted, 0);
        for (std::size_t r = 0; r < t.retrieves_accepted; ++r) ++accepted_through[r];
        max_summaries_per_retrieve = std::max(max_summaries_per_retrieve, t.max_summaries_per_retrieve);
        max_bits_per_retrieve = std::max(max_bits_per_retrieve, t.max_bits_per_retrieve);
        if (t.complexity) {
            s_qubits = std::max(s_qubits, t.complexity->s_qubits);
            max_t_qubits_per_retrieve = std::max(max_t_qubits_per_retrieve, t.complexity->t_qubits_per_retrieve);
        }
    }

    void merge(const Aggregates& o) {
        trials += o.trials;
        correct_sessions += o.correct_sessions;
        buggy_sessions += o.buggy_sessions;
        false_buggy_sessions += o.false_buggy_sessions;
        undetected_wrong_sessions += o.undetected_wrong_sessions;
        retrieves_accepted += o.retrieves_accepted;
        wrong_answers += o.wrong_answers;
        if (accepted_through.size() < o.accepted_through.size()) accepted_through.resize(o.accepted_through.size(), 0);
        for (std::size_t r = 0; r < o.accepted_through.size(); ++r) accepted_through[r] += o.accepted_through[r];
        max_summaries_per_retrieve = std::max(max_summaries_per_retrieve, o.max_summaries_per_retrieve);
        max_bits_per_retrieve = std::max(max_bits_per_retrieve, o.max_bits_per_retrieve);
        s_qubits = std::max(s_qubits, o.s_qubits);
        max_t_qubits_per_retrieve = std::max(max_t_qubits_per_retrieve, o.max_t_qubits_per_retrieve);
    }
};

/// Closed-form values attached to a run.
struct AnalyticValues {
    std::size_t k = 0;
    std::size_t required_k = 0;
    double delta = 0.0;
    double lemma1_bound = 0.0;
    /// Incremental attacks: prod_i p_single(d_i/m)^k with the rounded flips.
    std::optional<double> predicted_all_accept;
    /// Substitution with a fixed message: ((1 + <E(x)|E(x~)>^2)/2)^k.
    std::optional<double> exact_all_accept;
    /// Code-specific overlap for the substitution pair.
    std::optional<double> exact_inner_product;
};

struct NamedCheck {
    std::string name;
    BoundReport report;
};

struct ExperimentResult {
    ExperimentConfig config;
    Aggregates aggregates;
    AnalyticValues analytic;
    std::vector<NamedCheck> checks;
    std::vector<std::vector<std::string>> trial_events;
    double wall_seconds = 0.0;
    std::size_t threads_used = 1;

    bool all_checks_pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const NamedCheck& c) { return c.report.pass; });
    }
};

namespace detail {

inline Message random_message(std::size_t n, Rng& rng) {
    Message msg(n);
    for (std::size_t i = 0; i < n; ++i) msg.set(i, static_cast<Bit>(rng() >> 63));
    return msg;
}

inline std::vector<ScriptOp> trial_script(const ExperimentConfig& cfg, Rng& rng) {
    const auto& spec = cfg.script;
    std::vector<ScriptOp> ops;
    switch (spec.kind) {
        case ScriptSpec::Kind::Default: {
            ops.push_back(ScriptOp::store());
            const std::size_t rounds = std::max<std::size_t>(cfg.attack.steps, 1);
            for (std::size_t i = 0; i < rounds; ++i) {
                if (i < cfg.attack.steps) ops.push_back(ScriptOp::attack());
                ops.push_back(ScriptOp::retrieve());
            }
            break;
        }
        case ScriptSpec::Kind::Explicit: ops = spec.ops; break;
        case ScriptSpec::Kind::Mixed: {
            ops.push_back(ScriptOp::store());
            std::size_t attacks = 0;
            for (std::size_t i = 1; i < spec.length; ++i) {
                if (bernoulli(rng, spec.store_probability)) {
                    ops.push_back(ScriptOp::store());
                } else {
                    if (attacks < cfg.attack.steps) {
                        ops.push_back(ScriptOp::attack());
                        ++attacks;
                    }
                    ops.push_back(ScriptOp::retrieve());
                }
            }
            break;
        }
    }
    return ops;
}

}  // namespace detail

/// Runs one session of `cfg` with its own RNG stream.
inline TrialRecord run_trial(const ExperimentConfig& cfg, std::uint64_t trial_index) {
    Rng rng(derive_trial_seed(cfg.seed, trial_index));
    const HadamardCode code = make_code(cfg);
    MemoryChecker<HadamardCode> checker(code, effective_k(cfg), cfg.epsilon);
    PublicMemory memory(code.length());
    Adversary adversary(cfg.attack, code);

    TrialRecord rec;
    const auto ops = detail::trial_script(cfg, rng);
    Message current;
    Codeword written;

    for (const auto& op : ops) {
        if (op.kind == ScriptOp::Kind::Attack) {
            adversary.apply_step(adversary.steps_done(), memory, rng);
            if (cfg.record_trials) rec.events.emplace_back("A");
            continue;
        }
        const bool honest = memory.initialized() && std::ranges::equal(memory.contents(), written.view());

        if (op.kind == ScriptOp::Kind::Store) {
            Message msg = op.message ? *op.message : cfg.message ? *cfg.message : detail::random_message(cfg.n, rng);
            const Verdict v = checker.store(memory, msg, rng);
            if (v.is_buggy()) {
                rec.buggy = true;
                rec.false_buggy = honest;
                if (cfg.record_trials) rec.events.emplace_back("S!");
                break;
            }
            written = code.encode(msg);
            current = std::move(msg);
            if (cfg.record_trials) rec.events.emplace_back("S");
            continue;
        }

        const std::size_t j = op.index ? *op.index : static_cast<std::size_t>(uniform_below(rng, cfg.n));
        const Verdict v = checker.retrieve(memory, j, rng);
        const OperationLog& log = checker.last_log();
        rec.max_summaries_per_retrieve = std::max(rec.max_summaries_per_retrieve, log.summaries_fetched);
        rec.max_bits_per_retrieve = std::max(rec.max_bits_per_retrieve, log.bits_read);
        if (v.is_buggy()) {
            rec.buggy = true;
            rec.false_buggy = honest;
            if (cfg.record_trials) rec.events.push_back("R" + std::to_string(j) + "!");
            break;
        }
        ++rec.retrieves_accepted;
        const ComplexityReport cr = checker.complexity_report(log);
        if (!rec.complexity || cr.t_qubits_per_retrieve > rec.complexity->t_qubits_per_retrieve) rec.complexity = cr;
        if (v.bit() != current[j]) ++rec.wrong_answers;
        if (cfg.record_trials) rec.events.push_back("R" + std::to_string(j) + "=" + std::to_string(v.bit()));
    }
    return rec;
}

inline AnalyticValues analytic_values(const ExperimentConfig& cfg) {
    const HadamardCode code = make_code(cfg);
    const CodeParams& p = code.params();
    AnalyticValues a;
    a.k = effective_k(cfg);
    a.delta = p.delta;
    try {
        a.required_k = required_k(cfg.epsilon, p.delta);
    } catch (const DomainError&) {
        a.required_k = 0;
    }
    a.lemma1_bound = lemma1_bound(p.delta, a.k);
    const double kd = static_cast<double>(a.k);

    if (const auto* inc = std::get_if<attack::Incremental>(&cfg.attack.kind)) {
        std::vector<double> rounded;
        for (std::size_t c : incremental_flip_counts(*inc, p.m)) {
            rounded.push_back(static_cast<double>(c) / static_cast<double>(p.m));
        }
        a.predicted_all_accept = std::pow(p_multi(rounded), kd);
    } else if (const auto* sub = std::get_if<attack::SubstituteCodeword>(&cfg.attack.kind)) {
        if (cfg.message) {
            const double ip = inner_product(make_fingerprint(code.encode(*cfg.message)),
                                            make_fingerprint(code.encode(sub->target)));
            a.exact_inner_product = ip;
            a.exact_all_accept = std::pow(0.5 * (1.0 + ip * ip), kd);
        }
    }
    return a;
}

namespace detail {

/// Standard checks for the kind of run `cfg` describes, at 4 sigma.
inline std::vector<NamedCheck> standard_checks(const ExperimentConfig& cfg, const Aggregates& agg,
                                               const AnalyticValues& a) {
    constexpr double kSigmas = 4.0;
    using C = BoundReport::Comparison;
    std::vector<NamedCheck> checks;
    const std::uint64_t n = agg.trials;
    const std::uint64_t accepted_all = n - agg.buggy_sessions;

    if (std::holds_alternative<attack::NoOp>(cfg.attack.kind)) {
        // Completeness is exact for this construction; no sampling slack.
        auto report = make_bound_report(1.0, agg.correct_sessions, n, kSigmas, C::AtLeast);
        report.pass = agg.correct_sessions == n && agg.buggy_sessions == 0;
        checks.push_back({"honest_correctness", report});
    } else if (a.predicted_all_accept && cfg.script.kind == ScriptSpec::Kind::Default) {
        checks.push_back(
            {"incremental_all_accept", make_bound_report(*a.predicted_all_accept, accepted_all, n, kSigmas, C::TwoSided)});
    } else if (std::holds_alternative<attack::SubstituteCodeword>(cfg.attack.kind)) {
        if (a.exact_inner_product && *a.exact_inner_product < 1.0) {
            checks.push_back(
                {"substitution_buggy_vs_bound", make_bound_report(1.0 - a.lemma1_bound, agg.buggy_sessions, n, kSigmas, C::AtLeast)});
            checks.push_back(
                {"substitution_buggy_vs_exact", make_bound_report(1.0 - *a.exact_all_accept, agg.buggy_sessions, n, kSigmas, C::TwoSided)});
        }
    }
    return checks;
}

}  // namespace detail

/// Runs `cfg.trials` independent sessions. Trial i uses the RNG seeded with
/// derive_trial_seed(cfg.seed, i), so every output except wall time and
/// thread count is independent of scheduling.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const auto t0 = std::chrono::steady_clock::now();

    ExperimentResult result;
    result.config = cfg;
    result.analytic = analytic_values(cfg);
    if (cfg.record_trials) result.trial_events.resize(cfg.trials);

    std::size_t threads = cfg.threads ? cfg.threads : std::max<std::size_t>(1, std::thread::hardware_concurrency());
    threads = static_cast<std::size_t>(std::min<std::uint64_t>(threads, cfg.trials));
    result.threads_used = threads;

    std::atomic<std::uint64_t> next{0};
    std::mutex merge_mutex;
    constexpr std::uint64_t kChunk = 256;
    auto worker = [&] {
        Aggregates local;
        for (;;) {
            const std::uint64_t begin = next.fetch_add(kChunk);
            if (begin >= cfg.trials) break;
            const std::uint64_t end = std::min(cfg.trials, begin + kChunk);
            for (std::uint64_t i = begin; i < end; ++i) {
                TrialRecord rec = run_trial(cfg, i);
                local.add(rec);
                if (cfg.record_trials) result.trial_events[i] = std::move(rec.events);
            }
        }
        std::lock_guard lock(merge_mutex);
        result.aggregates.merge(local);
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    result.checks = detail::standard_checks(cfg, result.aggregates, result.analytic);
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

// ---------------------------------------------------------------------------
// Output

inline nlohmann::json rate_json(std::uint64_t count, std::uint64_t samples) {
    const double p = samples ? static_cast<double>(count) / static_cast<double>(samples) : 0.0;
    return {{"count", count}, {"samples", samples}, {"rate", p}, {"std_error", binomial_std_error(p, samples)}};
}

inline nlohmann::json aggregates_json(const Aggregates& a) {
    nlohmann::json j;
    j["trials"] = a.trials;
    j["correctness"] = rate_json(a.correct_sessions, a.trials);
    j["buggy"] = rate_json(a.buggy_sessions, a.trials);
    j["false_buggy"] = rate_json(a.false_buggy_sessions, a.trials);
    j["all_accept"] = rate_json(a.trials - a.buggy_sessions, a.trials);
    j["undetected_wrong"] = rate_json(a.undetected_wrong_sessions, a.trials);
    auto& steps = j["accept_through_retrieve"] = nlohmann::json::array();
    for (auto c : a.accepted_through) steps.push_back(rate_json(c, a.trials));
    j["retrieves_accepted"] = a.retrieves_accepted;
    j["wrong_answers"] = a.wrong_answers;
    j["complexity"] = {{"s_qubits", a.s_qubits},
                       {"t_qubits_per_retrieve", a.max_t_qubits_per_retrieve},
                       {"max_summaries_per_retrieve", a.max_summaries_per_retrieve},
                       {"max_bits_read_per_retrieve", a.max_bits_per_retrieve}};
    return j;
}

inline nlohmann::json analytic_json(const AnalyticValues& a) {
    nlohmann::json j;
    j["k"] = a.k;
    j["required_k"] = a.required_k;
    j["delta"] = a.delta;
    j["lemma1_bound"] = a.lemma1_bound;
    j["predicted_all_accept"] = a.predicted_all_accept ? nlohmann::json(*a.predicted_all_accept) : nlohmann::json();
    j["exact_all_accept"] = a.exact_all_accept ? nlohmann::json(*a.exact_all_accept) : nlohmann::json();
    j["exact_inner_product"] = a.exact_inner_product ? nlohmann::json(*a.exact_inner_product) : nlohmann::json();
    return j;
}

inline const char* comparison_name(BoundReport::Comparison c) {
    switch (c) {
        case BoundReport::Comparison::TwoSided: return "two_sided";
        case BoundReport::Comparison::AtLeast: return "at_least";
        case BoundReport::Comparison::AtMost: return "at_most";
    }
    return "";
}

inline nlohmann::json bound_report_json(const BoundReport& r) {
    return {{"analytic", r.analytic},  {"empirical", r.empirical}, {"successes", r.successes},
            {"samples", r.samples},    {"std_error", r.std_error}, {"sigmas", r.sigmas},
            {"comparison", comparison_name(r.comparison)}, {"pass", r.pass}};
}

inline nlohmann::json result_json(const ExperimentResult& r) {
    nlohmann::json j;
    j["config"] = config_to_json(r.config);
    j["aggregates"] = aggregates_json(r.aggregates);
    j["analytic"] = analytic_json(r.analytic);
    auto& checks = j["checks"] = nlohmann::json::array();
    for (const auto& c : r.checks) {
        auto cj = bound_report_json(c.report);
        cj["name"] = c.name;
        checks.push_back(cj);
    }
    if (r.config.record_trials) j["trials"] = r.trial_events;
    j["metadata"] = {{"wall_seconds", r.wall_seconds}, {"threads", r.threads_used}};
    return j;
}

/// One row per rate: metric,count,samples,rate,std_error.
inline std::string result_csv(const ExperimentResult& r) {
    std::ostringstream out;
    out.precision(17);
    out << "metric,count,samples,rate,std_error\n";
    auto row = [&](const std::string& name, std::uint64_t count) {
        const auto rj = rate_json(count, r.aggregates.trials);
        out << name << ',' << count << ',' << r.aggregates.trials << ',' << rj["rate"].get<double>() << ','
            << rj["std_error"].get<double>() << '\n';
    };
    const auto& a = r.aggregates;
    row("correctness", a.correct_sessions);
    row("buggy", a.buggy_sessions);
    row("false_buggy", a.false_buggy_sessions);
    row("all_accept", a.trials - a.buggy_sessions);
    row("undetected_wrong", a.undetected_wrong_sessions);
    for (std::size_t i = 0; i < a.accepted_through.size(); ++i) {
        row("accept_through_retrieve_" + std::to_string(i + 1), a.accepted_through[i]);
    }
    return out.str();
}

/// Writes result.json or result.csv under `dir`, creating it if needed.
/// Returns the file path.
inline std::filesystem::path write_result(const ExperimentResult& r, const std::filesystem::path& dir,
                                          OutputFormat format) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    const auto path = dir / (format == OutputFormat::Csv ? "result.csv" : "result.json");
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    if (format == OutputFormat::Csv) {
        out << result_csv(r);
    } else {
        out << result_json(r).dump(2) << '\n';
    }
    if (!out) throw IoError("write to '" + path.string() + "' failed");
    return path;
}

}  // namespace qmc
