// Command-line front end: train, eval and oracle-check.
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tagirl/harness.hpp"
#include "tagirl/oracles.hpp"

namespace {

int run_train(const std::string& config_path, std::optional<std::uint64_t> seed,
              std::optional<std::size_t> steps,
              std::optional<std::string> out, std::optional<std::size_t> runs) {
    tagirl::RunConfig config = tagirl::load_run_config(config_path);
    if (seed) config.seed = *seed;
    if (steps) config.total_steps = *steps;
    if (out) config.output_dir = *out;
    if (runs) config.runs = *runs;
    config.validate();

    const tagirl::TrainingSummary summary = tagirl::run_training(config);
    for (const auto& run : summary.runs) {
        std::printf("seed %llu: %zu episodes, rolling%zu %.1f  -> %s\n",
                    static_cast<unsigned long long>(run.seed), run.episodes,
                    config.eval_window, run.final_rolling_mean,
                    run.directory.string().c_str());
    }
    std::printf("final rolling%zu return: %s\n", config.eval_window,
                summary.formatted().c_str());
    return 0;
}

int run_eval(const std::string& checkpoint, const std::string& env,
             std::size_t episodes, std::uint64_t seed) {
    const tagirl::EvalResult r =
        tagirl::evaluate(checkpoint, env, episodes, seed);
    std::printf("%zu greedy episodes on %s: mean %.2f, std %.2f\n", episodes,
                env.c_str(), r.mean, r.stddev);
    return 0;
}

int run_oracle_check() {
    namespace oracle = tagirl::oracle;
    const oracle::Report reports[] = {
        oracle::conjugacy_suite(1000, 7),
        oracle::chain_suite("replay", 3, 1),
        oracle::chain_suite("nstep", 3, 1),
    };
    bool ok = true;
    for (const auto& r : reports) {
        std::printf("[%s] %-12s worst %.3g (threshold %.3g, %zu cases)\n",
                    r.passed ? "PASS" : "FAIL", r.name.c_str(), r.worst,
                    r.threshold, r.cases);
        ok = ok && r.passed;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian deep Q-learning with analytic Gaussian inference"};
    app.require_subcommand(1);

    auto* train = app.add_subcommand("train", "Train an agent from a config");
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> steps;
    std::optional<std::string> out;
    std::optional<std::size_t> runs;
    train->add_option("--config", config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    train->add_option("--seed", seed, "Master seed (overrides config)");
    train->add_option("--steps", steps, "Total environment steps");
    train->add_option("--out", out, "Output directory");
    train->add_option("--runs", runs, "Number of consecutive seeds");

    auto* eval = app.add_subcommand("eval", "Greedy evaluation of a checkpoint");
    std::string checkpoint;
    std::string env_name;
    std::size_t episodes = 0;
    std::uint64_t eval_seed = 0;
    eval->add_option("--checkpoint", checkpoint, "TAGI1 checkpoint file")
        ->required();
    eval->add_option("--env", env_name, "Environment name (cartpole, chain)")
        ->required();
    eval->add_option("--episodes", episodes, "Episodes to run")->required();
    eval->add_option("--seed", eval_seed, "Episode seed");

    auto* oracle = app.add_subcommand(
        "oracle-check", "Run the conjugacy and chain-MDP oracle suites");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) return run_train(config_path, seed, steps, out, runs);
        if (*eval) return run_eval(checkpoint, env_name, episodes, eval_seed);
        if (*oracle) return run_oracle_check();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
