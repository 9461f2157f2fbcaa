// Q-learning agents driven by TAGI updates and Thompson sampling.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tagirl/gaussian.hpp"
#include "tagirl/network.hpp"
#include "tagirl/random.hpp"
#include "tagirl/targets.hpp"

namespace tagirl {

struct Transition {
    std::vector<double> state;
    std::size_t action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
    bool terminal = false;
};

/// Fixed-capacity FIFO of transitions; the oldest entry is evicted first.
class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition transition);
    std::size_t size() const noexcept { return size_; }
    std::size_t capacity() const noexcept { return capacity_; }
    bool empty() const noexcept { return size_ == 0; }

    /// Index 0 is the oldest stored transition.
    const Transition& operator[](std::size_t i) const;

    /// Uniform batch of indices: distinct when the buffer holds at least
    /// `batch` transitions, drawn with replacement otherwise.
    std::vector<std::size_t> sample_indices(std::size_t batch,
                                            Rng& rng) const;

  private:
    std::size_t capacity_;
    std::vector<Transition> slots_;
    std::size_t head_ = 0;  // next slot to overwrite
    std::size_t size_ = 0;
};

struct AgentConfig {
    Discount gamma{0.99};
    NoiseSchedule schedule{2.0, 0.9999, 0.3};
    std::size_t batch_size = 10;
    std::size_t buffer_capacity = 50000;
    std::size_t horizon = 128;  // n-step agent only
    bool normalize = false;

    /// Experience-replay defaults: batch 10, buffer 50 000, gamma 0.99,
    /// sigma_v 2 decaying by 0.9999 down to 0.3.
    static AgentConfig replay_defaults();
    /// n-step defaults: horizon 128, batch 32, same noise schedule, return
    /// normalization on.
    static AgentConfig nstep_defaults();

    void validate() const;
};

/// Thompson sampling: one posterior-predictive draw per action, arg-max,
/// ties to the lowest index.
std::size_t select_action(const GaussianVector& q, std::uint64_t seed);
std::size_t select_action(const GaussianVector& q, Rng& rng);

/// Arg-max of the predictive means, ties to the lowest index.
std::size_t greedy_action(const GaussianVector& q);

class Agent {
  public:
    virtual ~Agent() = default;

    /// Behaviour action for `state` (Thompson sampling).
    virtual std::size_t act(std::span<const double> state) = 0;
    /// Feeds one environment transition to the learner.
    virtual void observe(const Transition& transition) = 0;

    virtual const NetworkParameters& parameters() const = 0;
    virtual double sigma_v() const = 0;
};

/// Experience-replay learner: every environment step stores the transition,
/// then conditions the network on a fresh random batch, one transition at a
/// time. The noise schedule advances once per environment step.
class ReplayAgent final : public Agent {
  public:
    ReplayAgent(NetworkParameters params, AgentConfig config,
                std::uint64_t seed);

    std::size_t act(std::span<const double> state) override;
    void observe(const Transition& transition) override {
        replay_step(transition);
    }
    void replay_step(const Transition& transition);

    const NetworkParameters& parameters() const override { return params_; }
    double sigma_v() const override { return schedule_.sigma_v(); }
    const NoiseSchedule& schedule() const noexcept { return schedule_; }
    const ReplayBuffer& buffer() const noexcept { return buffer_; }

  private:
    void learn_from(const Transition& t);

    NetworkParameters params_;
    AgentConfig config_;
    NoiseSchedule schedule_;
    ReplayBuffer buffer_;
    Rng action_rng_;
    Rng replay_rng_;
};

/// On-policy n-step learner: collects `horizon` transitions, then builds
/// the n-step targets from a Thompson-sampled bootstrap at the last next
/// state and updates newest-first. A terminal transition flushes the window
/// early with no bootstrap.
class NStepAgent final : public Agent {
  public:
    NStepAgent(NetworkParameters params, AgentConfig config,
               std::uint64_t seed);

    std::size_t act(std::span<const double> state) override;
    void observe(const Transition& transition) override {
        nstep_step(transition);
    }
    void nstep_step(const Transition& transition);

    const NetworkParameters& parameters() const override { return params_; }
    double sigma_v() const override { return schedule_.sigma_v(); }
    const NoiseSchedule& schedule() const noexcept { return schedule_; }
    std::size_t pending() const noexcept { return window_.size(); }

    /// Targets used by the most recent flush, head first.
    const std::vector<TDTarget>& last_targets() const noexcept {
        return last_targets_;
    }

  private:
    void flush();

    NetworkParameters params_;
    AgentConfig config_;
    NoiseSchedule schedule_;
    std::vector<Transition> window_;
    std::vector<TDTarget> last_targets_;
    Rng action_rng_;
};

}  // namespace tagirl
