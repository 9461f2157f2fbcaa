#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace tagirl {

struct EnvObservation {
    std::vector<double> state;
    double reward = 0.0;
    bool terminal = false;
};

/// Contract every environment driven by the agents implements.
class Environment {
  public:
    virtual ~Environment() = default;

    virtual std::vector<double> reset(std::uint64_t seed) = 0;
    virtual EnvObservation step(std::size_t action) = 0;
    virtual std::size_t action_count() const = 0;
    virtual std::size_t state_dimension() const = 0;
    virtual std::string name() const = 0;
};

/// Classic cart-pole, Euler integration, 200-step episode cap.
class CartPole final : public Environment {
  public:
    struct State {
        double x = 0.0;          // m
        double x_dot = 0.0;      // m/s
        double theta = 0.0;      // rad
        double theta_dot = 0.0;  // rad/s
    };

    static constexpr double kGravity = 9.8;
    static constexpr double kCartMass = 1.0;
    static constexpr double kPoleMass = 0.1;
    static constexpr double kHalfLength = 0.5;
    static constexpr double kForceMagnitude = 10.0;
    static constexpr double kTau = 0.02;
    static constexpr double kXThreshold = 2.4;
    static constexpr double kThetaThreshold = 12.0 * 2.0 * 3.141592653589793 / 360.0;
    static constexpr std::size_t kMaxEpisodeSteps = 200;

    std::vector<double> reset(std::uint64_t seed) override;
    EnvObservation step(std::size_t action) override;
    std::size_t action_count() const override { return 2; }
    std::size_t state_dimension() const override { return 4; }
    std::string name() const override { return "cartpole"; }

    /// Places the cart in an arbitrary state and restarts the step counter.
    void set_state(const State& state);
    const State& state() const noexcept { return state_; }
    std::size_t elapsed_steps() const noexcept { return steps_; }

    /// One Euler step of the dynamics, without termination bookkeeping.
    static State integrate(const State& state, std::size_t action);
    static bool out_of_bounds(const State& state);

  private:
    State state_{};
    std::size_t steps_ = 0;
    bool done_ = true;
};

struct ChainMDPSpec {
    std::size_t length = 5;  // states 0..length-1; the last one is the goal
    double step_reward = 0.0;
    double goal_reward = 1.0;
};

/// Deterministic chain. Action 0 moves left (the left end is a wall),
/// action 1 moves right. Entering the goal pays goal_reward and ends the
/// episode; every other move pays step_reward. Observations are one-hot.
class ChainMDP final : public Environment {
  public:
    static constexpr std::size_t kLeft = 0;
    static constexpr std::size_t kRight = 1;

    explicit ChainMDP(ChainMDPSpec spec);

    std::vector<double> reset(std::uint64_t seed) override;
    EnvObservation step(std::size_t action) override;
    std::size_t action_count() const override { return 2; }
    std::size_t state_dimension() const override { return spec_.length; }
    std::string name() const override { return "chain"; }

    const ChainMDPSpec& spec() const noexcept { return spec_; }
    std::size_t position() const noexcept { return position_; }
    std::vector<double> encode(std::size_t position) const;

  private:
    ChainMDPSpec spec_;
    std::size_t position_ = 0;
    bool done_ = true;
};

/// Exact action values, indexed [state][action]. The goal row is zero.
using QTable = std::vector<std::array<double, 2>>;

QTable chain_q_oracle(const ChainMDPSpec& spec, double gamma);

/// max over (s, a) of |q(s,a) - (r + gamma * max_a' q(s', a'))| for the
/// non-goal states of the chain.
double chain_bellman_residual(const ChainMDPSpec& spec, double gamma,
                              const QTable& q);

std::unique_ptr<Environment> make_environment(const std::string& name,
                                              const ChainMDPSpec& chain = {});

}  // namespace tagirl
