#include "tagirl/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "tagirl/random.hpp"

namespace tagirl::oracle {

namespace {

using Matrix = std::vector<std::vector<double>>;

double relative_error(double got, double want) {
    const double scale = std::max(std::abs(got), std::abs(want));
    return scale < 1e-300 ? 0.0 : std::abs(got - want) / scale;
}

}  // namespace

RegressionPosterior bayesian_linear_regression(std::span<const double> mean,
                                               std::span<const double> variances,
                                               std::span<const double> h,
                                               double y,
                                               double noise_variance) {
    const std::size_t n = mean.size();
    if (variances.size() != n || h.size() != n) {
        throw std::invalid_argument("regression oracle: size mismatch");
    }
    Matrix cov(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) cov[i][i] = variances[i];

    // Joint of (theta, y): Cov(theta, y) = Sigma h, Var(y) = h^T Sigma h + r.
    std::vector<double> cov_theta_y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) cov_theta_y[i] += cov[i][k] * h[k];
    }
    double var_y = noise_variance;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        var_y += h[i] * cov_theta_y[i];
        mean_y += h[i] * mean[i];
    }

    RegressionPosterior post;
    post.means.resize(n);
    post.variances.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        post.means[i] = mean[i] + cov_theta_y[i] / var_y * (y - mean_y);
        post.variances[i] =
            cov[i][i] - cov_theta_y[i] * cov_theta_y[i] / var_y;
    }
    return post;
}

TDTarget nstep_direct(std::span<const double> rewards, std::size_t t,
                      double tail_mean, double tail_variance, double gamma,
                      double sigma_v) {
    const std::size_t n = rewards.size();
    if (t >= n) throw std::out_of_range("nstep_direct: index past window");
    const std::size_t k = n - t;
    double mean = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        mean += std::pow(gamma, static_cast<double>(i)) * rewards[t + i];
    }
    mean += std::pow(gamma, static_cast<double>(k)) * tail_mean;
    double noise = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
        noise += std::pow(gamma, 2.0 * static_cast<double>(m));
    }
    const double var =
        std::pow(gamma, 2.0 * static_cast<double>(k)) * tail_variance +
        sigma_v * sigma_v * noise;
    return {mean, var};
}

Report conjugacy_suite(std::size_t cases, std::uint64_t seed,
                       double tolerance) {
    Report report{"conjugacy", true, 0.0, tolerance, cases};
    Rng rng(seed);
    std::uniform_int_distribution<int> width(1, 6);
    std::uniform_int_distribution<int> outputs(1, 3);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> positive(0.05, 2.0);

    for (std::size_t c = 0; c < cases; ++c) {
        const std::size_t n_in = static_cast<std::size_t>(width(rng));
        const std::size_t n_out = static_cast<std::size_t>(outputs(rng));
        LayerParameters layer;
        layer.spec = {n_in, n_out, Activation::identity};
        for (std::size_t k = 0; k < n_in * n_out; ++k) {
            layer.weight_means.push_back(unit(rng));
            layer.weight_variances.push_back(positive(rng));
        }
        for (std::size_t k = 0; k < n_out; ++k) {
            layer.bias_means.push_back(unit(rng));
            layer.bias_variances.push_back(positive(rng));
        }
        std::vector<double> x(n_in);
        for (auto& v : x) v = 3.0 * unit(rng);
        const std::size_t action =
            std::uniform_int_distribution<std::size_t>(0, n_out - 1)(rng);
        const TDTarget target{5.0 * unit(rng), positive(rng)};

        const NetworkParameters prior({layer});
        const ForwardResult fwd = forward(prior, x);
        const NetworkParameters post = update(prior, fwd.trace, action, target);
        const LayerParameters& got = post.layers().front();

        // Parameters of the observed unit: its weights then its bias.
        std::vector<double> m, v, h;
        for (std::size_t i = 0; i < n_in; ++i) {
            m.push_back(layer.weight_means[layer.weight_index(action, i)]);
            v.push_back(layer.weight_variances[layer.weight_index(action, i)]);
            h.push_back(x[i]);
        }
        m.push_back(layer.bias_means[action]);
        v.push_back(layer.bias_variances[action]);
        h.push_back(1.0);
        const RegressionPosterior want = bayesian_linear_regression(
            m, v, h, target.mean, target.noise_variance);

        double worst = 0.0;
        for (std::size_t i = 0; i < n_in; ++i) {
            const std::size_t w = layer.weight_index(action, i);
            worst = std::max(worst,
                             relative_error(got.weight_means[w], want.means[i]));
            worst = std::max(worst, relative_error(got.weight_variances[w],
                                                   want.variances[i]));
        }
        worst = std::max(worst, relative_error(got.bias_means[action],
                                               want.means[n_in]));
        worst = std::max(worst, relative_error(got.bias_variances[action],
                                               want.variances[n_in]));
        // Other output units share no parameters with the observation.
        for (std::size_t j = 0; j < n_out; ++j) {
            if (j == action) continue;
            for (std::size_t i = 0; i < n_in; ++i) {
                const std::size_t w = layer.weight_index(j, i);
                if (got.weight_means[w] != layer.weight_means[w] ||
                    got.weight_variances[w] != layer.weight_variances[w]) {
                    worst = std::max(worst, 1.0);
                }
            }
            if (got.bias_means[j] != layer.bias_means[j] ||
                got.bias_variances[j] != layer.bias_variances[j]) {
                worst = std::max(worst, 1.0);
            }
        }
        report.worst = std::max(report.worst, worst);
    }
    report.passed = report.worst <= tolerance;
    return report;
}

RunConfig chain_run_config(const std::string& agent) {
    RunConfig c;
    c.environment = "chain";
    c.agent = agent;
    c.chain = {5, 0.0, 1.0};
    c.hidden_layers = {{64, Activation::relu}};
    AgentConfig a = agent == "nstep" ? AgentConfig::nstep_defaults()
                                     : AgentConfig::replay_defaults();
    a.gamma = Discount(0.9);
    // Values on the chain live in [0, 1]; the noise starts at 0.5 rather
    // than the CartPole scale of 2 and decays to the usual floor of 0.3.
    a.schedule = NoiseSchedule(0.5, 0.9999, 0.3);
    a.horizon = 4;
    a.normalize = false;
    c.agent_config = a;
    c.total_steps = 20000;
    c.runs = 3;
    return c;
}

QTable learned_chain_q(const NetworkParameters& params,
                       const ChainMDPSpec& spec) {
    const ChainMDP env(spec);
    QTable q(spec.length, {0.0, 0.0});
    for (std::size_t s = 0; s + 1 < spec.length; ++s) {
        const GaussianVector out = forward(params, env.encode(s)).q;
        q[s] = {out.mean(0), out.mean(1)};
    }
    return q;
}

ChainOutcome train_on_chain(const RunConfig& config, std::uint64_t seed) {
    config.validate();
    if (config.environment != "chain") {
        throw std::invalid_argument("train_on_chain needs a chain config");
    }
    ChainMDP env(config.chain);
    auto agent = make_run_agent(config, env, seed);
    drive(*agent, env, config.total_steps, seed, {});

    ChainOutcome out{0.0, 0.0, agent->parameters()};
    const double gamma = config.agent_config.gamma.value();
    const QTable exact = chain_q_oracle(config.chain, gamma);
    const QTable learned = learned_chain_q(out.params, config.chain);
    for (std::size_t s = 0; s + 1 < config.chain.length; ++s) {
        for (std::size_t a = 0; a < 2; ++a) {
            out.max_error =
                std::max(out.max_error, std::abs(learned[s][a] - exact[s][a]));
        }
    }
    out.bellman_residual = chain_bellman_residual(config.chain, gamma, learned);
    return out;
}

Report chain_suite(const std::string& agent, std::size_t seeds,
                   std::uint64_t first_seed, double tolerance) {
    Report report{"chain-" + agent, true, 0.0, tolerance, seeds};
    const RunConfig config = chain_run_config(agent);
    for (std::size_t k = 0; k < seeds; ++k) {
        const ChainOutcome o = train_on_chain(config, first_seed + k);
        report.worst = std::max(report.worst, o.max_error);
    }
    report.passed = report.worst <= tolerance;
    return report;
}

}  // namespace tagirl::oracle
