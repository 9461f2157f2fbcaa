// Independent reference computations used to check the engine: dense
// Bayesian linear regression, direct n-step sums and tabular value
// iteration on the chain MDP. Nothing here calls into the update path it
// is meant to check.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tagirl/envs.hpp"
#include "tagirl/harness.hpp"
#include "tagirl/network.hpp"
#include "tagirl/td_target.hpp"

namespace tagirl::oracle {

struct Report {
    std::string name;
    bool passed = false;
    double worst = 0.0;  // worst observed error for the suite's metric
    double threshold = 0.0;
    std::size_t cases = 0;
};

/// Exact Gaussian posterior of theta for y = h^T theta + v, v ~ N(0, r),
/// with prior N(mean, diag(variances)). Returns posterior means and the
/// diagonal of the posterior covariance, computed with dense matrices.
struct RegressionPosterior {
    std::vector<double> means;
    std::vector<double> variances;
};
RegressionPosterior bayesian_linear_regression(std::span<const double> mean,
                                               std::span<const double> variances,
                                               std::span<const double> h,
                                               double y, double noise_variance);

/// Direct discounted sum for target index t of an n-step window.
TDTarget nstep_direct(std::span<const double> rewards, std::size_t t,
                      double tail_mean, double tail_variance, double gamma,
                      double sigma_v);

/// Random single-layer identity networks, one observation each; compares
/// the engine's update against bayesian_linear_regression.
Report conjugacy_suite(std::size_t cases, std::uint64_t seed,
                       double tolerance = 1e-10);

/// Run configuration for the chain convergence check (length 5, gamma 0.9).
RunConfig chain_run_config(const std::string& agent);

/// Learned predictive means for every chain state, [state][action].
QTable learned_chain_q(const NetworkParameters& params,
                       const ChainMDPSpec& spec);

struct ChainOutcome {
    double max_error = 0.0;        // vs value iteration, non-goal states
    double bellman_residual = 0.0; // of the learned table
    NetworkParameters params;
};

/// Trains `config.agent` on the chain for `config.total_steps` steps
/// without writing any files.
ChainOutcome train_on_chain(const RunConfig& config, std::uint64_t seed);

Report chain_suite(const std::string& agent, std::size_t seeds,
                   std::uint64_t first_seed, double tolerance = 0.1);

}  // namespace tagirl::oracle
