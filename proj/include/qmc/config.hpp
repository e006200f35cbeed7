#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmc/adversary.hpp"
#include "qmc/bits.hpp"
#include "qmc/checker.hpp"
#include "qmc/code.hpp"
#include "qmc/errors.hpp"

namespace qmc {

/// One user or adversary action in a session script.
struct ScriptOp {
    enum class Kind { Store, Retrieve, Attack };

    Kind kind = Kind::Store;
    /// Store: explicit message, or nullopt for a fresh random message.
    std::optional<Message> message;
    /// Retrieve: explicit 0-based bit index, or nullopt for a random one.
    std::optional<std::size_t> index;

    static ScriptOp store(std::optional<Message> msg = std::nullopt) { return {Kind::Store, std::move(msg), {}}; }
    static ScriptOp retrieve(std::optional<std::size_t> j = std::nullopt) { return {Kind::Retrieve, {}, j}; }
    static ScriptOp attack() { return {Kind::Attack, {}, {}}; }

    /// "store", "store:0110", "retrieve", "retrieve:3", "attack".
    std::string to_string() const {
        switch (kind) {
            case Kind::Store: return message ? "store:" + message->to_string() : "store";
            case Kind::Retrieve: return index ? "retrieve:" + std::to_string(*index) : "retrieve";
            case Kind::Attack: return "attack";
        }
        return {};
    }

    static ScriptOp parse(std::string_view text) {
        const auto colon = text.find(':');
        const std::string_view head = text.substr(0, colon);
        const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
        if (head == "store") {
            if (arg.empty()) return store();
            return store(Message::from_string(arg));
        }
        if (head == "retrieve") {
            if (arg.empty()) return retrieve();
            std::size_t j = 0;
            for (char c : arg) {
                if (c < '0' || c > '9') throw ShapeError("bad retrieve index '" + std::string(arg) + "'");
                j = j * 10 + static_cast<std::size_t>(c - '0');
            }
            return retrieve(j);
        }
        if (head == "attack" && arg.empty()) return attack();
        throw ShapeError("unknown script op '" + std::string(text) + "'");
    }

    friend bool operator==(const ScriptOp&, const ScriptOp&) = default;
};

/// How each trial's operation sequence is produced.
struct ScriptSpec {
    enum class Kind {
        /// store, then (attack step, retrieve) for every attack step; a
        /// single retrieve when the attack has no steps.
        Default,
        /// The ops listed in `ops`.
        Explicit,
        /// Per-trial random sequence: a store, then `length - 1` ops, each a
        /// store with probability `store_probability` and otherwise a
        /// retrieve. Attack steps precede the first retrieves.
        Mixed,
    };

    Kind kind = Kind::Default;
    std::vector<ScriptOp> ops;
    std::size_t length = 0;
    double store_probability = 0.0;

    friend bool operator==(const ScriptSpec&, const ScriptSpec&) = default;
};

enum class OutputFormat { Json, Csv };

struct ExperimentConfig {
    std::size_t n = 4;
    std::string code = "hadamard";
    /// Decoder radius override; nullopt keeps the code's default.
    std::optional<double> delta_dec;
    double epsilon = 0.01;
    /// Fingerprint copies; nullopt means required_k(epsilon, delta).
    std::optional<std::size_t> k;
    /// Message for script stores without an explicit one; nullopt is random.
    std::optional<Message> message;
    ScriptSpec script;
    AttackSchedule attack = AttackSchedule::noop(0);
    /// Reject Incremental schedules whose rounded flips do not reach another
    /// codeword.
    bool require_codeword_reach = false;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    /// Worker threads; 0 picks the hardware concurrency. Results do not
    /// depend on it.
    std::size_t threads = 0;
    bool record_trials = false;
    std::string out_dir;
    OutputFormat format = OutputFormat::Json;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline HadamardCode make_code(const ExperimentConfig& cfg) {
    if (cfg.code != "hadamard") throw ValidationError("code", "unknown code '" + cfg.code + "'");
    return cfg.delta_dec ? HadamardCode(cfg.n, *cfg.delta_dec) : HadamardCode(cfg.n);
}

/// Copies the checker will use for this config.
inline std::size_t effective_k(const ExperimentConfig& cfg) {
    if (cfg.k) return *cfg.k;
    return required_k(cfg.epsilon, make_code(cfg).params().delta);
}

/// Throws ValidationError naming the offending field.
inline void validate_config(const ExperimentConfig& cfg) {
    if (cfg.n < 1 || cfg.n > HadamardCode::kMaxMessageBits) {
        throw ValidationError("n", "must be in [1, " + std::to_string(HadamardCode::kMaxMessageBits) + "]");
    }
    if (cfg.code != "hadamard") throw ValidationError("code", "unknown code '" + cfg.code + "'");
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 0.5)) throw ValidationError("epsilon", "must be in (0, 1/2)");
    if (cfg.k && *cfg.k < 1) throw ValidationError("k", "must be >= 1 or \"auto\"");
    std::optional<HadamardCode> code;
    try {
        code.emplace(make_code(cfg));
    } catch (const DomainError& e) {
        throw ValidationError("delta_dec", e.what());
    }
    if (!cfg.k) {
        try {
            (void)effective_k(cfg);
        } catch (const DomainError& e) {
            throw ValidationError("k", e.what());
        }
    }
    if (cfg.message && cfg.message->size() != cfg.n) {
        throw ValidationError("message", "must have " + std::to_string(cfg.n) + " bits");
    }
    if (cfg.trials < 1) throw ValidationError("trials", "must be >= 1");

    validate_schedule(cfg.attack, code->params().m, cfg.n, "attack");
    if (cfg.require_codeword_reach) {
        if (!cfg.attack.is_incremental()) {
            throw ValidationError("attack.require_codeword_reach", "only applies to incremental schedules");
        }
        if (!codeword_reachability_check(cfg.attack, code->params())) {
            throw ValidationError("attack.deltas", "rounded flips do not reach relative distance delta");
        }
    }

    const auto& s = cfg.script;
    switch (s.kind) {
        case ScriptSpec::Kind::Default: break;
        case ScriptSpec::Kind::Explicit: {
            if (s.ops.empty() || s.ops.front().kind != ScriptOp::Kind::Store) {
                throw ValidationError("script.ops[0]", "script must begin with a store");
            }
            std::size_t attacks = 0;
            for (std::size_t i = 0; i < s.ops.size(); ++i) {
                const auto& op = s.ops[i];
                const std::string field = "script.ops[" + std::to_string(i) + "]";
                if (op.kind == ScriptOp::Kind::Store && op.message && op.message->size() != cfg.n) {
                    throw ValidationError(field, "message must have " + std::to_string(cfg.n) + " bits");
                }
                if (op.kind == ScriptOp::Kind::Retrieve && op.index && *op.index >= cfg.n) {
                    throw ValidationError(field, "bit index must be < " + std::to_string(cfg.n));
                }
                if (op.kind == ScriptOp::Kind::Attack) ++attacks;
            }
            if (attacks > cfg.attack.steps) {
                throw ValidationError("script.ops", "more attack ops than attack steps");
            }
            break;
        }
        case ScriptSpec::Kind::Mixed:
            if (s.length < 1) throw ValidationError("script.length", "must be >= 1");
            if (!(s.store_probability >= 0.0 && s.store_probability <= 1.0)) {
                throw ValidationError("script.store_probability", "must be in [0, 1]");
            }
            break;
    }
}

// ---------------------------------------------------------------------------
// JSON form

inline nlohmann::json attack_to_json(const AttackSchedule& a) {
    nlohmann::json j;
    j["steps"] = a.steps;
    j["policy"] = a.policy == PositionPolicy::Prefix ? "prefix" : "uniform";
    std::visit(
        [&](const auto& kind) {
            using K = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<K, attack::NoOp>) {
                j["kind"] = "none";
            } else if constexpr (std::is_same_v<K, attack::SubstituteCodeword>) {
                j["kind"] = "substitute";
                j["target"] = kind.target.to_string();
            } else if constexpr (std::is_same_v<K, attack::FlipCount>) {
                j["kind"] = "flip_count";
                j["bits_per_step"] = kind.bits_per_step;
            } else {
                j["kind"] = "incremental";
                j["deltas"] = kind.deltas;
            }
        },
        a.kind);
    return j;
}

namespace detail {

template <class T>
T get_field(const nlohmann::json& j, const std::string& key, const std::string& path) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + key, e.what());
    }
}

template <class T>
T get_field_or(const nlohmann::json& j, const std::string& key, const std::string& path, T fallback) {
    if (!j.contains(key)) return fallback;
    return get_field<T>(j, key, path);
}

inline Message parse_message(const std::string& text, const std::string& field) {
    try {
        return Message::from_string(text);
    } catch (const ShapeError& e) {
        throw ValidationError(field, e.what());
    }
}

}  // namespace detail

inline AttackSchedule attack_from_json(const nlohmann::json& j) {
    using detail::get_field;
    using detail::get_field_or;
    if (!j.is_object()) throw ValidationError("attack", "must be an object");
    const std::string kind = get_field_or<std::string>(j, "kind", "attack.", "none");
    const std::string policy_name = get_field_or<std::string>(j, "policy", "attack.", "uniform");
    PositionPolicy policy;
    if (policy_name == "uniform") {
        policy = PositionPolicy::Uniform;
    } else if (policy_name == "prefix") {
        policy = PositionPolicy::Prefix;
    } else {
        throw ValidationError("attack.policy", "must be \"uniform\" or \"prefix\"");
    }

    AttackSchedule a;
    if (kind == "none") {
        a = AttackSchedule::noop(get_field_or<std::size_t>(j, "steps", "attack.", 0));
    } else if (kind == "substitute") {
        a = AttackSchedule::substitute(detail::parse_message(get_field<std::string>(j, "target", "attack."), "attack.target"),
                                       get_field_or<std::size_t>(j, "steps", "attack.", 1));
    } else if (kind == "flip_count") {
        a = AttackSchedule::flip_count(get_field<std::size_t>(j, "bits_per_step", "attack."),
                                       get_field_or<std::size_t>(j, "steps", "attack.", 1));
    } else if (kind == "incremental") {
        a = AttackSchedule::incremental(get_field<std::vector<double>>(j, "deltas", "attack."));
        if (j.contains("steps") && get_field<std::size_t>(j, "steps", "attack.") != a.steps) {
            throw ValidationError("attack.steps", "must equal the number of deltas");
        }
    } else {
        throw ValidationError("attack.kind", "unknown attack kind '" + kind + "'");
    }
    a.policy = policy;
    return a;
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["n"] = c.n;
    j["code"] = c.code;
    if (c.delta_dec) j["delta_dec"] = *c.delta_dec;
    j["epsilon"] = c.epsilon;
    if (c.k) {
        j["k"] = *c.k;
    } else {
        j["k"] = "auto";
    }
    j["message"] = c.message ? c.message->to_string() : "random";

    nlohmann::json s;
    switch (c.script.kind) {
        case ScriptSpec::Kind::Default: s["kind"] = "default"; break;
        case ScriptSpec::Kind::Explicit: {
            s["kind"] = "explicit";
            auto& ops = s["ops"] = nlohmann::json::array();
            for (const auto& op : c.script.ops) ops.push_back(op.to_string());
            break;
        }
        case ScriptSpec::Kind::Mixed:
            s["kind"] = "mixed";
            s["length"] = c.script.length;
            s["store_probability"] = c.script.store_probability;
            break;
    }
    j["script"] = s;

    j["attack"] = attack_to_json(c.attack);
    j["attack"]["require_codeword_reach"] = c.require_codeword_reach;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["record_trials"] = c.record_trials;
    j["out_dir"] = c.out_dir;
    j["format"] = c.format == OutputFormat::Csv ? "csv" : "json";
    return j;
}

/// Builds a config from its JSON form. Missing keys keep their defaults;
/// the result is not validated (see validate_config).
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    using detail::get_field;
    using detail::get_field_or;
    if (!j.is_object()) throw ValidationError("<root>", "config must be a JSON object");
    ExperimentConfig c;
    c.n = get_field_or<std::size_t>(j, "n", "", c.n);
    c.code = get_field_or<std::string>(j, "code", "", c.code);
    if (j.contains("delta_dec")) c.delta_dec = get_field<double>(j, "delta_dec", "");
    c.epsilon = get_field_or<double>(j, "epsilon", "", c.epsilon);
    if (j.contains("k")) {
        const auto& kj = j.at("k");
        if (kj.is_string()) {
            if (kj.get<std::string>() != "auto") throw ValidationError("k", "must be an integer or \"auto\"");
        } else {
            c.k = get_field<std::size_t>(j, "k", "");
        }
    }
    if (j.contains("message")) {
        const auto text = get_field<std::string>(j, "message", "");
        if (text != "random") c.message = detail::parse_message(text, "message");
    }
    if (j.contains("script")) {
        const auto& s = j.at("script");
        if (!s.is_object()) throw ValidationError("script", "must be an object");
        const auto kind = get_field_or<std::string>(s, "kind", "script.", "default");
        if (kind == "default") {
            c.script.kind = ScriptSpec::Kind::Default;
        } else if (kind == "explicit") {
            c.script.kind = ScriptSpec::Kind::Explicit;
            const auto ops = get_field<std::vector<std::string>>(s, "ops", "script.");
            for (std::size_t i = 0; i < ops.size(); ++i) {
                try {
                    c.script.ops.push_back(ScriptOp::parse(ops[i]));
                } catch (const ShapeError& e) {
                    throw ValidationError("script.ops[" + std::to_string(i) + "]", e.what());
                }
            }
        } else if (kind == "mixed") {
            c.script.kind = ScriptSpec::Kind::Mixed;
            c.script.length = get_field<std::size_t>(s, "length", "script.");
            c.script.store_probability = get_field<double>(s, "store_probability", "script.");
        } else {
            throw ValidationError("script.kind", "unknown script kind '" + kind + "'");
        }
    }
    if (j.contains("attack")) {
        c.attack = attack_from_json(j.at("attack"));
        c.require_codeword_reach = get_field_or<bool>(j.at("attack"), "require_codeword_reach", "attack.", false);
    }
    c.trials = get_field_or<std::uint64_t>(j, "trials", "", c.trials);
    c.seed = get_field_or<std::uint64_t>(j, "seed", "", c.seed);
    c.threads = get_field_or<std::size_t>(j, "threads", "", c.threads);
    c.record_trials = get_field_or<bool>(j, "record_trials", "", c.record_trials);
    c.out_dir = get_field_or<std::string>(j, "out_dir", "", c.out_dir);
    const auto fmt = get_field_or<std::string>(j, "format", "", "json");
    if (fmt == "json") {
        c.format = OutputFormat::Json;
    } else if (fmt == "csv") {
        c.format = OutputFormat::Csv;
    } else {
        throw ValidationError("format", "must be \"json\" or \"csv\"");
    }
    return c;
}

inline ExperimentConfig parse_config(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("<root>", e.what());
    }
    return config_from_json(j);
}

inline std::string serialize_config(const ExperimentConfig& c) { return config_to_json(c).dump(2); }

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace qmc
