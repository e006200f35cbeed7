// Command-line front end: simulate, bounds, verify-lemma2, oracle-check.
//
// Exit codes: 0 success, 1 validation error, 2 self-check failure, 3 I/O error.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qmc/qmc.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kExitIo = 3;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::string out_dir;
    std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "Experiment config file (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Master seed (overrides QMC_SEED and the config)");
    cmd->add_option("--trials", o.trials, "Number of trials");
    cmd->add_option("--out", o.out_dir, "Output directory");
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

std::optional<std::uint64_t> seed_from_env() {
    const char* env = std::getenv("QMC_SEED");
    if (!env || !*env) return std::nullopt;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(env, &used, 0);
        if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw qmc::ValidationError("QMC_SEED", "not an unsigned 64-bit integer");
    }
}

/// Flat key,value CSV for a JSON object; nested keys joined with '.'.
void print_flat_csv(const nlohmann::json& j, const std::string& prefix, std::ostream& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) print_flat_csv(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) print_flat_csv(j[i], prefix + "[" + std::to_string(i) + "]", out);
    } else {
        out << prefix << ',' << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
    }
}

void emit(const nlohmann::json& j, const std::string& format) {
    if (format == "csv") {
        std::cout << "key,value\n";
        print_flat_csv(j, "", std::cout);
    } else {
        std::cout << j.dump(2) << '\n';
    }
}

std::vector<double> parse_list(const std::string& text, const std::string& field) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw qmc::ValidationError(field, "bad number '" + item + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum online memory checker simulator"};
    app.require_subcommand(1);

    // simulate
    CommonOptions sim;
    std::optional<std::size_t> sim_n, sim_k, sim_threads;
    std::optional<double> sim_epsilon;
    std::string sim_attack, sim_deltas, sim_target, sim_message;
    bool sim_check = false;
    auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo experiment");
    add_common(simulate, sim);
    simulate->add_option("--n", sim_n, "Message length");
    simulate->add_option("--k", sim_k, "Fingerprint copies (default: from epsilon)");
    simulate->add_option("--epsilon", sim_epsilon, "Target error rate");
    simulate->add_option("--threads", sim_threads, "Worker threads (0 = all cores)");
    simulate->add_option("--attack", sim_attack, "none | substitute | incremental")
        ->check(CLI::IsMember({"none", "substitute", "incremental"}));
    simulate->add_option("--deltas", sim_deltas, "Incremental flip fractions, comma separated");
    simulate->add_option("--target", sim_target, "Substitution target message, e.g. 0110");
    simulate->add_option("--message", sim_message, "Stored message (default random)");
    simulate->add_flag("--check", sim_check, "Exit 2 if any built-in statistical check fails");

    // bounds
    CommonOptions bnd;
    double b_epsilon = 0.01, b_delta = 0.5;
    std::optional<std::size_t> b_k;
    std::string b_deltas;
    auto* bounds = app.add_subcommand("bounds", "Evaluate the closed-form detection bounds");
    add_common(bounds, bnd);
    bounds->add_option("--epsilon", b_epsilon, "Target error rate")->capture_default_str();
    bounds->add_option("--delta", b_delta, "Relative code distance")->capture_default_str();
    bounds->add_option("--k", b_k, "Copies (default: required_k)");
    bounds->add_option("--deltas", b_deltas, "Per-step flip fractions for p_multi, comma separated");

    // verify-lemma2
    CommonOptions lem;
    std::uint32_t grid = 20, t_max = 4;
    auto* lemma2 = app.add_subcommand("verify-lemma2", "Exhaustively check that splitting flips never helps");
    add_common(lemma2, lem);
    lemma2->add_option("--grid", grid, "Grid denominator (step 1/grid)")->capture_default_str();
    lemma2->add_option("--t-max", t_max, "Largest number of steps")->capture_default_str();

    // oracle-check
    CommonOptions orc;
    std::size_t max_m = 32, pairs = 200;
    auto* oracle = app.add_subcommand("oracle-check", "Cross-check SWAP-test probabilities with a statevector");
    add_common(oracle, orc);
    oracle->add_option("--max-m", max_m, "Largest fingerprint length (power of two, <= 64)")->capture_default_str();
    oracle->add_option("--pairs", pairs, "Random pairs per length")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        const auto env_seed = seed_from_env();

        if (*simulate) {
            qmc::ExperimentConfig cfg;
            if (!sim.config_path.empty()) cfg = qmc::load_config(sim.config_path);
            if (sim_n) cfg.n = *sim_n;
            if (sim_k) cfg.k = *sim_k;
            if (sim_epsilon) cfg.epsilon = *sim_epsilon;
            if (sim_threads) cfg.threads = *sim_threads;
            if (!sim_message.empty()) cfg.message = qmc::detail::parse_message(sim_message, "message");
            if (sim_attack == "none") {
                cfg.attack = qmc::AttackSchedule::noop(0);
            } else if (sim_attack == "substitute") {
                if (sim_target.empty()) throw qmc::ValidationError("attack.target", "--target is required");
                cfg.attack = qmc::AttackSchedule::substitute(qmc::detail::parse_message(sim_target, "attack.target"));
            } else if (sim_attack == "incremental") {
                cfg.attack = qmc::AttackSchedule::incremental(parse_list(sim_deltas, "attack.deltas"));
            }
            if (env_seed) cfg.seed = *env_seed;
            if (sim.seed) cfg.seed = *sim.seed;
            if (sim.trials) cfg.trials = *sim.trials;
            if (!sim.out_dir.empty()) cfg.out_dir = sim.out_dir;
            if (simulate->count("--format")) cfg.format = sim.format == "csv" ? qmc::OutputFormat::Csv : qmc::OutputFormat::Json;

            const auto result = qmc::run_experiment(cfg);
            if (!cfg.out_dir.empty()) {
                const auto path = qmc::write_result(result, cfg.out_dir, cfg.format);
                std::cerr << "wrote " << path.string() << '\n';
            }
            if (cfg.format == qmc::OutputFormat::Csv) {
                std::cout << qmc::result_csv(result);
            } else {
                std::cout << qmc::result_json(result).dump(2) << '\n';
            }
            return (sim_check && !result.all_checks_pass()) ? kExitCheckFailed : kExitOk;
        }

        if (*bounds) {
            nlohmann::json j;
            const std::size_t req = qmc::required_k(b_epsilon, b_delta);
            const std::size_t k = b_k ? *b_k : req;
            j["epsilon"] = b_epsilon;
            j["delta"] = b_delta;
            j["required_k"] = req;
            j["k"] = k;
            j["p_single"] = qmc::p_single(b_delta);
            j["lemma1_bound"] = qmc::lemma1_bound(b_delta, k);
            j["detection_lower_bound"] = 1.0 - qmc::lemma1_bound(b_delta, k);
            if (!b_deltas.empty()) {
                const auto ds = parse_list(b_deltas, "deltas");
                double total = 0.0;
                for (double d : ds) total += d;
                j["deltas"] = ds;
                j["p_multi"] = qmc::p_multi(ds);
                j["p_single_of_sum"] = qmc::p_single(total);
            }
            emit(j, bnd.format);
            return kExitOk;
        }

        if (*lemma2) {
            const auto rep = qmc::verify_lemma2(grid, t_max);
            nlohmann::json j{{"grid_denominator", rep.grid_denominator},
                             {"max_steps", rep.max_steps},
                             {"compositions_checked", rep.compositions_checked},
                             {"violations", rep.violations},
                             {"min_margin", rep.min_margin},
                             {"identity_checked", rep.identity_checked},
                             {"identity_mismatches", rep.identity_mismatches},
                             {"plus_form_mismatches", rep.plus_form_mismatches},
                             {"pass", rep.pass()}};
            emit(j, lem.format);
            return rep.pass() ? kExitOk : kExitCheckFailed;
        }

        if (*oracle) {
            std::vector<std::size_t> lengths;
            for (std::size_t m = 2; m <= max_m; m *= 2) lengths.push_back(m);
            std::uint64_t seed = 1;
            if (env_seed) seed = *env_seed;
            if (orc.seed) seed = *orc.seed;
            const auto rep = qmc::cross_validate_swap_test(lengths, pairs, seed);
            nlohmann::json j{{"lengths", lengths},
                             {"pairs_per_length", pairs},
                             {"comparisons", rep.comparisons},
                             {"max_abs_diff", rep.max_abs_diff},
                             {"tolerance", rep.tolerance},
                             {"pass", rep.pass()}};
            emit(j, orc.format);
            return rep.pass() ? kExitOk : kExitCheckFailed;
        }
    } catch (const qmc::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const qmc::ValidationError& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}
