#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "qmc/experiment.hpp"

using namespace qmc;

namespace {

ExperimentConfig honest(std::size_t n, std::uint64_t trials) {
    ExperimentConfig c;
    c.n = n;
    c.trials = trials;
    c.seed = 17;
    c.script.kind = ScriptSpec::Kind::Mixed;
    c.script.length = 10;
    c.script.store_probability = 0.3;
    return c;
}

}  // namespace

TEST(Experiment, HonestRunsArePerfect) {
    for (std::size_t n : {1u, 3u, 6u, 10u}) {
        const auto r = run_experiment(honest(n, 2000));
        EXPECT_EQ(r.aggregates.trials, 2000u);
        EXPECT_EQ(r.aggregates.correct_sessions, 2000u) << n;
        EXPECT_EQ(r.aggregates.buggy_sessions, 0u);
        EXPECT_EQ(r.aggregates.false_buggy_sessions, 0u);
        EXPECT_EQ(r.aggregates.wrong_answers, 0u);
        EXPECT_TRUE(r.all_checks_pass());
    }
}

TEST(Experiment, DefaultScriptShape) {
    ExperimentConfig c;
    c.n = 3;
    c.k = 1;
    c.trials = 1;
    c.record_trials = true;
    c.attack = AttackSchedule::noop(2);
    const auto r = run_experiment(c);
    ASSERT_EQ(r.trial_events.size(), 1u);
    const auto& ev = r.trial_events[0];
    ASSERT_EQ(ev.size(), 5u);
    EXPECT_EQ(ev[0], "S");
    EXPECT_EQ(ev[1], "A");
    EXPECT_EQ(ev[3], "A");
    EXPECT_EQ(ev[2].substr(0, 1), "R");
}

TEST(Experiment, ReproducibleIndependentOfThreads) {
    auto c = honest(4, 3000);
    c.attack = AttackSchedule::incremental({0.25, 0.125});
    c.k = 2;
    c.record_trials = true;
    c.threads = 1;
    const auto a = run_experiment(c);
    c.threads = 4;
    const auto b = run_experiment(c);
    EXPECT_EQ(a.trial_events, b.trial_events);
    EXPECT_EQ(aggregates_json(a.aggregates).dump(), aggregates_json(b.aggregates).dump());
    c.seed = 18;
    const auto d = run_experiment(c);
    EXPECT_NE(a.trial_events, d.trial_events);
}

TEST(Experiment, SubstitutionDetection) {
    ExperimentConfig c;
    c.n = 4;
    c.epsilon = 0.01;
    c.message = Message::from_string("1011");
    c.attack = AttackSchedule::substitute(Message::from_string("0110"));
    c.trials = 20000;
    c.seed = 3;
    const auto r = run_experiment(c);
    EXPECT_EQ(r.analytic.k, 7u);
    EXPECT_DOUBLE_EQ(*r.analytic.exact_inner_product, 0.0);
    EXPECT_DOUBLE_EQ(*r.analytic.exact_all_accept, 0.0078125);
    EXPECT_DOUBLE_EQ(r.analytic.lemma1_bound, 0.0078125);
    ASSERT_EQ(r.checks.size(), 2u);
    EXPECT_TRUE(r.all_checks_pass());
    EXPECT_EQ(r.aggregates.false_buggy_sessions, 0u);
}

TEST(Experiment, SubstitutionOntoSameCodewordIsNotAnAttack) {
    ExperimentConfig c;
    c.n = 3;
    c.message = Message::from_string("101");
    c.attack = AttackSchedule::substitute(Message::from_string("101"));
    c.trials = 500;
    const auto r = run_experiment(c);
    EXPECT_EQ(r.aggregates.buggy_sessions, 0u);
    EXPECT_DOUBLE_EQ(*r.analytic.exact_all_accept, 1.0);
    EXPECT_TRUE(r.checks.empty());
}

TEST(Experiment, IncrementalAcceptanceMatchesProduct) {
    ExperimentConfig c;
    c.n = 3;
    c.k = 1;
    c.epsilon = 0.25;
    c.attack = AttackSchedule::incremental({0.25, 0.25});
    c.trials = 40000;
    c.seed = 11;
    const auto r = run_experiment(c);
    EXPECT_DOUBLE_EQ(*r.analytic.predicted_all_accept, 0.390625);
    ASSERT_EQ(r.checks.size(), 1u);
    EXPECT_TRUE(r.checks[0].report.pass) << r.checks[0].report.empirical;
    // First retrieve alone accepts with probability 0.625.
    ASSERT_GE(r.aggregates.accepted_through.size(), 1u);
    const double first = double(r.aggregates.accepted_through[0]) / double(c.trials);
    EXPECT_NEAR(first, 0.625, 4 * std::sqrt(0.625 * 0.375 / double(c.trials)));
}

TEST(Experiment, QueryAccountingBound) {
    ExperimentConfig c;
    c.n = 5;
    c.k = 3;
    c.attack = AttackSchedule::flip_count(2, 4);
    c.trials = 500;
    const auto r = run_experiment(c);
    EXPECT_LE(r.aggregates.max_summaries_per_retrieve, 2u * 3u);
    EXPECT_LE(r.aggregates.max_bits_per_retrieve, 2u);
    EXPECT_EQ(r.aggregates.s_qubits, 15u);
    EXPECT_EQ(r.aggregates.max_t_qubits_per_retrieve, 2u * 3u * 5u + 2u);
}

TEST(Experiment, InvalidConfigRejected) {
    ExperimentConfig c;
    c.n = 0;
    EXPECT_THROW(run_experiment(c), ValidationError);
}

TEST(Experiment, WritesJsonAndCsv) {
    const auto dir = std::filesystem::temp_directory_path() / "qmc_experiment_test";
    std::filesystem::remove_all(dir);
    auto c = honest(3, 100);
    const auto r = run_experiment(c);
    const auto jpath = write_result(r, dir, OutputFormat::Json);
    const auto cpath = write_result(r, dir, OutputFormat::Csv);
    std::ifstream jin(jpath);
    const auto j = nlohmann::json::parse(jin);
    EXPECT_EQ(j.at("aggregates").at("trials").get<std::uint64_t>(), 100u);
    EXPECT_EQ(j.at("aggregates").at("correctness").at("rate").get<double>(), 1.0);
    EXPECT_EQ(parse_config(j.at("config").dump()), c);
    std::ifstream cin(cpath);
    std::string header, first;
    std::getline(cin, header);
    std::getline(cin, first);
    EXPECT_EQ(header, "metric,count,samples,rate,std_error");
    EXPECT_EQ(first.rfind("correctness,100,100,1,", 0), 0u) << first;
    EXPECT_THROW(write_result(r, "/proc/qmc-no-such-dir/x", OutputFormat::Json), IoError);
}
