#include "tagirl/targets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tagirl {

namespace {

void check_sigma_v(double sigma_v) {
    if (!(sigma_v >= 0.0) || !std::isfinite(sigma_v)) {
        throw std::invalid_argument("sigma_v must be finite and non-negative");
    }
}

}  // namespace

Discount::Discount(double gamma) : gamma_(gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("discount must lie in [0, 1)");
    }
}

NoiseSchedule::NoiseSchedule(double sigma_v_init, double eta,
                             double sigma_v_min)
    : sigma_v_init_(sigma_v_init),
      eta_(eta),
      sigma_v_min_(sigma_v_min),
      sigma_v_(sigma_v_init) {
    if (!(sigma_v_init > 0.0) || !std::isfinite(sigma_v_init)) {
        throw std::invalid_argument("initial sigma_v must be positive");
    }
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw std::invalid_argument("decay factor eta must lie in (0, 1]");
    }
    if (!(sigma_v_min >= 0.0) || sigma_v_min > sigma_v_init) {
        throw std::invalid_argument(
            "minimal sigma_v must lie in [0, initial sigma_v]");
    }
}

NoiseSchedule decay_sigma_v(NoiseSchedule schedule) {
    schedule.sigma_v_ =
        std::max(schedule.sigma_v_min_, schedule.eta_ * schedule.sigma_v_);
    ++schedule.steps_;
    return schedule;
}

TDTarget td_target(double reward, GaussianVariable next_q, Discount gamma,
                   double sigma_v, bool terminal) {
    check_sigma_v(sigma_v);
    const double noise = sigma_v * sigma_v;
    if (terminal) {
        return {reward, noise};
    }
    const double g = gamma.value();
    return {reward + g * next_q.mean(), g * g * next_q.variance() + noise};
}

std::vector<TDTarget> nstep_targets(std::span<const double> rewards,
                                    GaussianVariable tail_q, Discount gamma,
                                    double sigma_v, bool terminal) {
    if (rewards.empty()) {
        throw std::invalid_argument("nstep_targets: no rewards");
    }
    check_sigma_v(sigma_v);
    const double g = gamma.value();
    const double noise = sigma_v * sigma_v;
    double mean = terminal ? 0.0 : tail_q.mean();
    double var = terminal ? 0.0 : tail_q.variance();
    std::vector<TDTarget> out(rewards.size());
    for (std::size_t j = rewards.size(); j-- > 0;) {
        mean = rewards[j] + g * mean;
        var = g * g * var + noise;
        out[j] = {mean, var};
    }
    return out;
}

std::vector<TDTarget> normalize_returns(std::span<const TDTarget> targets) {
    if (targets.empty()) {
        throw std::invalid_argument("normalize_returns: no targets");
    }
    const double n = static_cast<double>(targets.size());
    double mean = 0.0;
    for (const auto& t : targets) mean += t.mean;
    mean /= n;
    double ss = 0.0;
    for (const auto& t : targets) ss += (t.mean - mean) * (t.mean - mean);
    const double sd = std::sqrt(ss / n);
    const double scale = sd < 1e-8 ? 1.0 : sd;

    std::vector<TDTarget> out(targets.begin(), targets.end());
    for (auto& t : out) t.mean = (t.mean - mean) / scale;
    return out;
}

}  // namespace tagirl
