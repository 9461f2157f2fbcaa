#include <cmath>
#include <random>
#include <stdexcept>

#include "tagirl/envs.hpp"
#include "tagirl/random.hpp"

namespace tagirl {

namespace {

std::vector<double> as_vector(const CartPole::State& s) {
    return {s.x, s.x_dot, s.theta, s.theta_dot};
}

}  // namespace

CartPole::State CartPole::integrate(const State& s, std::size_t action) {
    constexpr double total_mass = kCartMass + kPoleMass;
    constexpr double polemass_length = kPoleMass * kHalfLength;

    const double force = action == 1 ? kForceMagnitude : -kForceMagnitude;
    const double cos_theta = std::cos(s.theta);
    const double sin_theta = std::sin(s.theta);
    const double temp =
        (force + polemass_length * s.theta_dot * s.theta_dot * sin_theta) /
        total_mass;
    const double theta_acc =
        (kGravity * sin_theta - cos_theta * temp) /
        (kHalfLength *
         (4.0 / 3.0 - kPoleMass * cos_theta * cos_theta / total_mass));
    const double x_acc =
        temp - polemass_length * theta_acc * cos_theta / total_mass;

    State next;
    next.x = s.x + kTau * s.x_dot;
    next.x_dot = s.x_dot + kTau * x_acc;
    next.theta = s.theta + kTau * s.theta_dot;
    next.theta_dot = s.theta_dot + kTau * theta_acc;
    return next;
}

bool CartPole::out_of_bounds(const State& s) {
    return s.x < -kXThreshold || s.x > kXThreshold ||
           s.theta < -kThetaThreshold || s.theta > kThetaThreshold;
}

std::vector<double> CartPole::reset(std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    state_.x = u(rng);
    state_.x_dot = u(rng);
    state_.theta = u(rng);
    state_.theta_dot = u(rng);
    steps_ = 0;
    done_ = false;
    return as_vector(state_);
}

void CartPole::set_state(const State& state) {
    state_ = state;
    steps_ = 0;
    done_ = false;
}

EnvObservation CartPole::step(std::size_t action) {
    if (done_) {
        throw std::logic_error("cartpole: step called on a finished episode");
    }
    if (action >= action_count()) {
        throw std::out_of_range("cartpole: action must be 0 or 1");
    }
    state_ = integrate(state_, action);
    ++steps_;
    done_ = out_of_bounds(state_) || steps_ >= kMaxEpisodeSteps;
    return {as_vector(state_), 1.0, done_};
}

}  // namespace tagirl
