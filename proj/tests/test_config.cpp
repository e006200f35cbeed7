#include <gtest/gtest.h>

#include "qmc/config.hpp"

using namespace qmc;

namespace {

ExperimentConfig sample_config(Rng& rng) {
    ExperimentConfig c;
    c.n = 1 + uniform_below(rng, 8);
    if (rng() & 1) c.delta_dec = 0.0625;
    c.epsilon = 0.01 + 0.4 * uniform01(rng);
    if (rng() & 1) c.k = 1 + uniform_below(rng, 9);
    if (rng() & 1) {
        Message m(c.n);
        for (std::size_t i = 0; i < c.n; ++i) m.set(i, rng() & 1);
        c.message = m;
    }
    switch (uniform_below(rng, 4)) {
        case 0: c.attack = AttackSchedule::noop(uniform_below(rng, 3)); break;
        case 1: c.attack = AttackSchedule::substitute(Message(c.n), 1 + uniform_below(rng, 2)); break;
        case 2: c.attack = AttackSchedule::flip_count(1, 2, PositionPolicy::Prefix); break;
        default: c.attack = AttackSchedule::incremental({uniform01(rng) / 3, uniform01(rng) / 3}); break;
    }
    switch (uniform_below(rng, 3)) {
        case 0: break;
        case 1:
            c.script.kind = ScriptSpec::Kind::Explicit;
            c.script.ops = {ScriptOp::store(), ScriptOp::retrieve(0), ScriptOp::store(Message(c.n)), ScriptOp::retrieve()};
            break;
        default:
            c.script.kind = ScriptSpec::Kind::Mixed;
            c.script.length = 1 + uniform_below(rng, 30);
            c.script.store_probability = uniform01(rng);
            break;
    }
    c.trials = 1 + uniform_below(rng, 1000000);
    c.seed = rng();
    c.threads = uniform_below(rng, 8);
    c.record_trials = rng() & 1;
    c.out_dir = (rng() & 1) ? "out/run" : "";
    c.format = (rng() & 1) ? OutputFormat::Csv : OutputFormat::Json;
    return c;
}

}  // namespace

TEST(Config, RoundTripProperty) {
    Rng rng(2024);
    for (int i = 0; i < 500; ++i) {
        const auto c = sample_config(rng);
        const auto text = serialize_config(c);
        ASSERT_EQ(parse_config(text), c) << text;
    }
}

TEST(Config, DefaultsFromEmptyObject) {
    const auto c = parse_config("{}");
    EXPECT_EQ(c, ExperimentConfig{});
    EXPECT_NO_THROW(validate_config(c));
    EXPECT_EQ(effective_k(c), 7u);
}

TEST(Config, ParsesSample) {
    const auto c = parse_config(R"({
        "n": 3, "k": "auto", "epsilon": 0.25, "message": "101",
        "script": {"kind": "explicit", "ops": ["store", "attack", "retrieve:2", "store:011"]},
        "attack": {"kind": "incremental", "deltas": [0.25, 0.25], "policy": "prefix", "require_codeword_reach": true},
        "trials": 10, "seed": 5, "format": "csv"
    })");
    EXPECT_EQ(c.n, 3u);
    EXPECT_FALSE(c.k.has_value());
    EXPECT_EQ(effective_k(c), 2u);
    EXPECT_EQ(c.message->to_string(), "101");
    ASSERT_EQ(c.script.ops.size(), 4u);
    EXPECT_EQ(c.script.ops[2], ScriptOp::retrieve(2));
    EXPECT_EQ(c.script.ops[3], ScriptOp::store(Message::from_string("011")));
    EXPECT_EQ(c.attack.policy, PositionPolicy::Prefix);
    EXPECT_TRUE(c.require_codeword_reach);
    EXPECT_EQ(c.format, OutputFormat::Csv);
    EXPECT_NO_THROW(validate_config(c));
}

namespace {
std::string field_of(const std::string& json) {
    try {
        validate_config(parse_config(json));
    } catch (const ValidationError& e) {
        return e.field();
    }
    return "<none>";
}
}  // namespace

TEST(Config, ValidationNamesTheField) {
    EXPECT_EQ(field_of(R"({"n": 0})"), "n");
    EXPECT_EQ(field_of(R"({"n": 30})"), "n");
    EXPECT_EQ(field_of(R"({"epsilon": 0.5})"), "epsilon");
    EXPECT_EQ(field_of(R"({"k": 0})"), "k");
    EXPECT_EQ(field_of(R"({"k": "many"})"), "k");
    EXPECT_EQ(field_of(R"({"code": "reed-muller"})"), "code");
    EXPECT_EQ(field_of(R"({"n": 3, "delta_dec": 0.3})"), "delta_dec");
    EXPECT_EQ(field_of(R"({"n": 3, "message": "10"})"), "message");
    EXPECT_EQ(field_of(R"({"n": 3, "message": "1x0"})"), "message");
    EXPECT_EQ(field_of(R"({"trials": 0})"), "trials");
    EXPECT_EQ(field_of(R"({"n": 3, "attack": {"kind": "incremental", "deltas": [0.5, 2.0]}})"), "attack.deltas[1]");
    EXPECT_EQ(field_of(R"({"n": 3, "attack": {"kind": "incremental", "deltas": [0.75, 0.5]}})"), "attack.deltas");
    EXPECT_EQ(field_of(R"({"n": 3, "attack": {"kind": "incremental", "deltas": [0.1, 0.1], "require_codeword_reach": true}})"),
              "attack.deltas");
    EXPECT_EQ(field_of(R"({"attack": {"kind": "teleport"}})"), "attack.kind");
    EXPECT_EQ(field_of(R"({"attack": {"kind": "substitute"}})"), "attack.target");
    EXPECT_EQ(field_of(R"({"attack": {"kind": "none", "policy": "zigzag"}})"), "attack.policy");
    EXPECT_EQ(field_of(R"({"n": 3, "script": {"kind": "explicit", "ops": ["retrieve"]}})"), "script.ops[0]");
    EXPECT_EQ(field_of(R"({"n": 3, "script": {"kind": "explicit", "ops": ["store", "retrieve:3"]}})"), "script.ops[1]");
    EXPECT_EQ(field_of(R"({"n": 3, "script": {"kind": "explicit", "ops": ["store", "jump"]}})"), "script.ops[1]");
    EXPECT_EQ(field_of(R"({"n": 3, "script": {"kind": "explicit", "ops": ["store", "attack"]}})"), "script.ops");
    EXPECT_EQ(field_of(R"({"script": {"kind": "mixed", "length": 0, "store_probability": 0.5}})"), "script.length");
    EXPECT_EQ(field_of(R"({"format": "xml"})"), "format");
    EXPECT_EQ(field_of(R"({"n": "three"})"), "n");
    EXPECT_EQ(field_of("[1, 2]"), "<root>");
    EXPECT_EQ(field_of("{\"n\": "), "<root>");
}

TEST(Config, LoadMissingFileIsIoError) { EXPECT_THROW(load_config("/nonexistent/qmc.json"), IoError); }

TEST(ScriptOp, StringForms) {
    for (const char* s : {"store", "store:0101", "retrieve", "retrieve:12", "attack"}) {
        EXPECT_EQ(ScriptOp::parse(s).to_string(), s);
    }
    EXPECT_THROW(ScriptOp::parse("retrieve:x"), ShapeError);
    EXPECT_THROW(ScriptOp::parse("attack:1"), ShapeError);
}
