// Observation targets for Q-learning with a Gaussian value model.
//
// A target is the scalar observation y used to condition q(s, a): the
// reward plus a discounted bootstrap from the network's posterior
// predictive, with the value noise sigma_v folded into its variance.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tagirl/gaussian.hpp"
#include "tagirl/td_target.hpp"

namespace tagirl {

/// Discount factor in [0, 1).
class Discount {
  public:
    explicit Discount(double gamma);
    double value() const noexcept { return gamma_; }

  private:
    double gamma_;
};

/// Per-batch geometric decay of the value-noise standard deviation, floored
/// at sigma_v_min.
class NoiseSchedule {
  public:
    NoiseSchedule(double sigma_v_init, double eta, double sigma_v_min);

    double sigma_v() const noexcept { return sigma_v_; }
    double sigma_v_init() const noexcept { return sigma_v_init_; }
    double eta() const noexcept { return eta_; }
    double sigma_v_min() const noexcept { return sigma_v_min_; }
    std::size_t steps() const noexcept { return steps_; }

  private:
    friend NoiseSchedule decay_sigma_v(NoiseSchedule schedule);

    double sigma_v_init_;
    double eta_;
    double sigma_v_min_;
    double sigma_v_;
    std::size_t steps_ = 0;
};

/// Non-terminal: (r + gamma * mu_next, gamma^2 * var_next + sigma_v^2).
/// Terminal: (r, sigma_v^2).
TDTarget td_target(double reward, GaussianVariable next_q, Discount gamma,
                   double sigma_v, bool terminal);

/// Targets for a window of rewards r_0..r_{n-1}, head first, built by the
/// backward recursion mu_j = r_j + gamma * mu_{j+1},
/// var_j = gamma^2 * var_{j+1} + sigma_v^2, seeded with the tail
/// bootstrap. A terminal window uses a zero tail.
std::vector<TDTarget> nstep_targets(std::span<const double> rewards,
                                    GaussianVariable tail_q, Discount gamma,
                                    double sigma_v, bool terminal = false);

NoiseSchedule decay_sigma_v(NoiseSchedule schedule);

/// Standardizes the target means with their population standard deviation
/// (centering only when it is below 1e-8). Noise variances are kept.
std::vector<TDTarget> normalize_returns(std::span<const TDTarget> targets);

}  // namespace tagirl
