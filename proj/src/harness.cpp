#include "tagirl/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tagirl/checkpoint.hpp"
#include "tagirl/random.hpp"

namespace tagirl {

namespace {

// Streams derived from the master seed.
constexpr std::uint64_t kInitStream = 10;
constexpr std::uint64_t kAgentStream = 11;
constexpr std::uint64_t kEnvStream = 12;

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::unique_ptr<Agent> make_agent(const RunConfig& config,
                                  NetworkParameters params,
                                  std::uint64_t seed) {
    config.agent_config.validate();
    if (config.agent == "replay") {
        return std::make_unique<ReplayAgent>(std::move(params),
                                             config.agent_config, seed);
    }
    if (config.agent == "nstep") {
        return std::make_unique<NStepAgent>(std::move(params),
                                            config.agent_config, seed);
    }
    throw ConfigError("unknown agent '" + config.agent + "'");
}

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw std::runtime_error("cannot create output directory '" +
                                 dir.string() + "': " + ec.message());
    }
}

}  // namespace

std::vector<LayerSpec> build_architecture(const RunConfig& config,
                                          const Environment& env) {
    std::vector<LayerSpec> specs;
    std::size_t width = env.state_dimension();
    for (const auto& h : config.hidden_layers) {
        specs.push_back({width, h.units, h.activation});
        width = h.units;
    }
    specs.push_back({width, env.action_count(), Activation::identity});
    return specs;
}

// ---------------------------------------------------------------------------
// Metrics CSV

std::string format_metrics_row(const MetricsRow& row) {
    std::ostringstream out;
    out << row.step << ',' << row.episode << ','
        << format_real(row.episode_return) << ','
        << format_real(row.rolling_mean) << ',' << format_real(row.sigma_v)
        << ',' << format_real(row.seconds);
    return out.str();
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
    out << kMetricsHeader << '\n';
    for (const auto& row : rows) out << format_metrics_row(row) << '\n';
}

std::vector<MetricsRow> parse_metrics_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kMetricsHeader) {
        throw std::runtime_error("metrics CSV header mismatch: expected '" +
                                 std::string(kMetricsHeader) + "'");
    }
    std::vector<MetricsRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 6) {
            throw std::runtime_error("metrics CSV line " +
                                     std::to_string(line_no) +
                                     ": expected 6 fields");
        }
        try {
            MetricsRow r;
            r.step = std::stoull(fields[0]);
            r.episode = std::stoull(fields[1]);
            r.episode_return = std::stod(fields[2]);
            r.rolling_mean = std::stod(fields[3]);
            r.sigma_v = std::stod(fields[4]);
            r.seconds = std::stod(fields[5]);
            rows.push_back(r);
        } catch (const std::logic_error&) {
            throw std::runtime_error("metrics CSV line " +
                                     std::to_string(line_no) +
                                     ": malformed number");
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Training

std::string TrainingSummary::formatted() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f ± %.1f", mean, spread);
    return buf;
}

std::unique_ptr<Agent> make_run_agent(const RunConfig& config,
                                      const Environment& env,
                                      std::uint64_t seed) {
    const auto specs = build_architecture(config, env);
    return make_agent(config,
                      init_parameters(specs, derive_seed(seed, kInitStream)),
                      derive_seed(seed, kAgentStream));
}

void drive(Agent& agent, Environment& env, std::size_t steps,
           std::uint64_t seed,
           const std::function<void(std::size_t, double)>& on_episode,
           const std::function<void(std::size_t)>& on_step) {
    Rng episode_seeds(derive_seed(seed, kEnvStream));
    std::vector<double> state = env.reset(episode_seeds());
    double episode_return = 0.0;
    for (std::size_t step = 1; step <= steps; ++step) {
        const std::size_t action = agent.act(state);
        EnvObservation obs = env.step(action);
        episode_return += obs.reward;
        agent.observe(
            {std::move(state), action, obs.reward, obs.state, obs.terminal});
        state = std::move(obs.state);
        if (obs.terminal) {
            if (on_episode) on_episode(step, episode_return);
            episode_return = 0.0;
            state = env.reset(episode_seeds());
        }
        if (on_step) on_step(step);
    }
}

RunResult run_single(const RunConfig& config, std::uint64_t seed) {
    config.validate();
    auto env = make_environment(config.environment, config.chain);
    auto agent = make_run_agent(config, *env, seed);

    RunResult result;
    result.seed = seed;
    result.directory = config.output_dir / ("run_" + std::to_string(seed));
    ensure_directory(result.directory);

    const auto start = std::chrono::steady_clock::now();
    std::deque<double> window;
    auto on_episode = [&](std::size_t step, double episode_return) {
        window.push_back(episode_return);
        if (window.size() > config.eval_window) window.pop_front();
        MetricsRow row;
        row.step = step;
        row.episode = result.metrics.size() + 1;
        row.episode_return = episode_return;
        row.rolling_mean = std::accumulate(window.begin(), window.end(), 0.0) /
                           static_cast<double>(window.size());
        row.sigma_v = agent->sigma_v();
        if (config.wall_time) {
            row.seconds = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - start)
                              .count();
        }
        result.metrics.push_back(row);
    };
    auto on_step = [&](std::size_t step) {
        if (config.checkpoint_interval > 0 &&
            step % config.checkpoint_interval == 0) {
            save_checkpoint(agent->parameters(),
                            result.directory /
                                ("checkpoint_step_" + std::to_string(step) +
                                 ".tagi"));
        }
    };
    drive(*agent, *env, config.total_steps, seed, on_episode, on_step);

    result.episodes = result.metrics.size();
    result.final_rolling_mean =
        result.metrics.empty() ? 0.0 : result.metrics.back().rolling_mean;

    {
        std::ofstream csv(result.directory / "metrics.csv",
                          std::ios::binary | std::ios::trunc);
        if (!csv) {
            throw std::runtime_error("cannot write metrics in '" +
                                     result.directory.string() + "'");
        }
        write_metrics_csv(csv, result.metrics);
    }
    save_checkpoint(agent->parameters(), result.directory / "checkpoint.tagi");
    return result;
}

TrainingSummary run_training(const RunConfig& config) {
    config.validate();
    ensure_directory(config.output_dir);
    {
        std::ofstream out(config.output_dir / "config.json");
        if (!out) {
            throw std::runtime_error("cannot write into output directory '" +
                                     config.output_dir.string() + "'");
        }
        out << dump_run_config(config);
    }

    TrainingSummary summary;
    for (std::size_t k = 0; k < config.runs; ++k) {
        summary.runs.push_back(run_single(config, config.seed + k));
    }
    double sum = 0.0;
    for (const auto& r : summary.runs) sum += r.final_rolling_mean;
    const double n = static_cast<double>(summary.runs.size());
    summary.mean = sum / n;
    if (summary.runs.size() > 1) {
        double ss = 0.0;
        for (const auto& r : summary.runs) {
            ss += (r.final_rolling_mean - summary.mean) *
                  (r.final_rolling_mean - summary.mean);
        }
        summary.spread = std::sqrt(ss / (n - 1.0));
    }
    return summary;
}

// ---------------------------------------------------------------------------
// Evaluation

EvalResult evaluate(const NetworkParameters& params, Environment& env,
                    std::size_t episodes, std::uint64_t seed,
                    std::size_t max_episode_steps) {
    if (episodes == 0) {
        throw std::invalid_argument("evaluate: at least one episode required");
    }
    const auto& layers = params.layers();
    if (layers.empty()) throw std::invalid_argument("evaluate: empty network");
    if (params.input_width() != env.state_dimension()) {
        std::ostringstream msg;
        msg << "checkpoint layer 0 takes " << params.input_width()
            << " inputs but environment '" << env.name() << "' has state "
            << "dimension " << env.state_dimension();
        throw std::invalid_argument(msg.str());
    }
    if (params.output_width() != env.action_count()) {
        std::ostringstream msg;
        msg << "checkpoint layer " << layers.size() - 1 << " has "
            << params.output_width() << " outputs but environment '"
            << env.name() << "' has " << env.action_count() << " actions";
        throw std::invalid_argument(msg.str());
    }

    Rng episode_seeds(derive_seed(seed, kEnvStream));
    EvalResult result;
    for (std::size_t e = 0; e < episodes; ++e) {
        std::vector<double> state = env.reset(episode_seeds());
        double total = 0.0;
        for (std::size_t t = 0; t < max_episode_steps; ++t) {
            const std::size_t action = greedy_action(forward(params, state).q);
            EnvObservation obs = env.step(action);
            total += obs.reward;
            state = std::move(obs.state);
            if (obs.terminal) break;
        }
        result.returns.push_back(total);
    }
    const double n = static_cast<double>(episodes);
    result.mean =
        std::accumulate(result.returns.begin(), result.returns.end(), 0.0) / n;
    double ss = 0.0;
    for (double r : result.returns) ss += (r - result.mean) * (r - result.mean);
    result.stddev = std::sqrt(ss / n);
    return result;
}

EvalResult evaluate(const std::filesystem::path& checkpoint,
                    const std::string& environment, std::size_t episodes,
                    std::uint64_t seed) {
    if (episodes == 0) {
        throw std::invalid_argument("evaluate: at least one episode required");
    }
    const NetworkParameters params = load_checkpoint(checkpoint);
    auto env = make_environment(environment);
    return evaluate(params, *env, episodes, seed);
}

}  // namespace tagirl
