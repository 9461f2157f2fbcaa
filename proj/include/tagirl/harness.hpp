// Training and evaluation harness: run configuration, metrics CSV,
// checkpoints and seed sweeps.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "tagirl/agents.hpp"
#include "tagirl/envs.hpp"
#include "tagirl/network.hpp"

namespace tagirl {

struct HiddenLayer {
    std::size_t units = 64;
    Activation activation = Activation::relu;
};

struct RunConfig {
    std::string environment = "cartpole";
    std::string agent = "replay";  // "replay" or "nstep"
    std::vector<HiddenLayer> hidden_layers{{64, Activation::relu}};
    AgentConfig agent_config = AgentConfig::replay_defaults();
    ChainMDPSpec chain{};
    std::size_t total_steps = 1000000;
    std::size_t eval_window = 100;
    std::uint64_t seed = 0;
    std::size_t runs = 1;  // seeds seed, seed+1, ...
    std::filesystem::path output_dir = "runs";
    std::size_t checkpoint_interval = 0;  // steps; 0 writes only the final one
    bool wall_time = false;  // fill the `seconds` column from the clock

    void validate() const;
};

class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Parses a JSON run configuration. Missing keys take the defaults for
/// the chosen agent kind.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
/// Resolved configuration as JSON, written next to the metrics.
std::string dump_run_config(const RunConfig& config);

/// Output root used when neither the command line nor the config names one.
std::filesystem::path default_output_root();

/// Layer chain for an environment: hidden layers, then an identity output.
std::vector<LayerSpec> build_architecture(const RunConfig& config,
                                          const Environment& env);

/// Agent for one seeded run: parameters initialised and agent streams
/// derived from `seed` exactly as `train` does.
std::unique_ptr<Agent> make_run_agent(const RunConfig& config,
                                      const Environment& env,
                                      std::uint64_t seed);

/// Interaction loop shared by training and the oracle checks. Runs `steps`
/// environment steps, resetting episodes from seeds derived from `seed`.
/// `on_episode(step, episode_return)` fires at every episode end and
/// `on_step(step)` after every step.
void drive(Agent& agent, Environment& env, std::size_t steps,
           std::uint64_t seed,
           const std::function<void(std::size_t, double)>& on_episode,
           const std::function<void(std::size_t)>& on_step = {});

// ---------------------------------------------------------------------------
// Metrics

struct MetricsRow {
    std::size_t step = 0;
    std::size_t episode = 0;
    double episode_return = 0.0;
    double rolling_mean = 0.0;
    double sigma_v = 0.0;
    double seconds = 0.0;

    friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

inline constexpr char kMetricsHeader[] =
    "step,episode,return,rolling100,sigma_v,seconds";

std::string format_metrics_row(const MetricsRow& row);
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> parse_metrics_csv(std::istream& in);

// ---------------------------------------------------------------------------
// Runs

struct RunResult {
    std::uint64_t seed = 0;
    std::size_t episodes = 0;
    double final_rolling_mean = 0.0;
    std::filesystem::path directory;
    std::vector<MetricsRow> metrics;
};

struct TrainingSummary {
    std::vector<RunResult> runs;
    double mean = 0.0;    // of the final rolling means
    double spread = 0.0;  // sample standard deviation across runs

    /// "199.2 ± 1.3"
    std::string formatted() const;
};

/// Trains one seed and writes `run_<seed>/` under the output directory.
RunResult run_single(const RunConfig& config, std::uint64_t seed);
TrainingSummary run_training(const RunConfig& config);

struct EvalResult {
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> returns;
};

/// Greedy (predictive-mean arg-max) episodes. Episodes longer than
/// `max_episode_steps` are cut off.
EvalResult evaluate(const NetworkParameters& params, Environment& env,
                    std::size_t episodes, std::uint64_t seed,
                    std::size_t max_episode_steps = 10000);
EvalResult evaluate(const std::filesystem::path& checkpoint,
                    const std::string& environment, std::size_t episodes,
                    std::uint64_t seed);

}  // namespace tagirl
