#include "tagirl/agents.hpp"

#include <algorithm>
#include <stdexcept>

namespace tagirl {

namespace {

constexpr std::uint64_t kActionStream = 1;
constexpr std::uint64_t kReplayStream = 2;

void check_transition(const Transition& t, const NetworkParameters& params) {
    if (t.state.size() != params.input_width() ||
        t.next_state.size() != params.input_width()) {
        throw std::invalid_argument(
            "transition state dimension does not match the network input");
    }
    if (t.action >= params.output_width()) {
        throw std::out_of_range("transition action out of range");
    }
}

}  // namespace

AgentConfig AgentConfig::replay_defaults() { return AgentConfig{}; }

AgentConfig AgentConfig::nstep_defaults() {
    AgentConfig c;
    c.batch_size = 32;
    c.horizon = 128;
    c.normalize = true;
    return c;
}

void AgentConfig::validate() const {
    if (batch_size == 0 || buffer_capacity == 0 || horizon == 0) {
        throw std::invalid_argument(
            "batch size, buffer capacity and horizon must be positive");
    }
}

std::size_t greedy_action(const GaussianVector& q) {
    if (q.empty()) throw std::invalid_argument("no actions to choose from");
    const auto means = q.means();
    return static_cast<std::size_t>(
        std::max_element(means.begin(), means.end()) - means.begin());
}

std::size_t select_action(const GaussianVector& q, Rng& rng) {
    if (q.empty()) throw std::invalid_argument("no actions to choose from");
    const std::vector<double> draws = sample_output(q, rng);
    // max_element returns the first maximum, i.e. the lowest index on ties.
    return static_cast<std::size_t>(
        std::max_element(draws.begin(), draws.end()) - draws.begin());
}

std::size_t select_action(const GaussianVector& q, std::uint64_t seed) {
    Rng rng(seed);
    return select_action(q, rng);
}

// ---------------------------------------------------------------------------
// ReplayBuffer

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) {
        throw std::invalid_argument("replay buffer capacity must be positive");
    }
}

void ReplayBuffer::push(Transition transition) {
    if (slots_.size() < capacity_) {
        slots_.push_back(std::move(transition));
    } else {
        slots_[head_] = std::move(transition);
    }
    head_ = (head_ + 1) % capacity_;
    size_ = std::min(size_ + 1, capacity_);
}

const Transition& ReplayBuffer::operator[](std::size_t i) const {
    if (i >= size_) throw std::out_of_range("replay buffer index");
    const std::size_t oldest = size_ < capacity_ ? 0 : head_;
    return slots_[(oldest + i) % capacity_];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch,
                                                      Rng& rng) const {
    if (size_ == 0) return {};
    std::vector<std::size_t> out;
    out.reserve(batch);
    if (size_ < batch) {
        std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
        for (std::size_t k = 0; k < batch; ++k) out.push_back(pick(rng));
        return out;
    }
    // Floyd's algorithm: `batch` distinct indices in O(batch^2).
    for (std::size_t j = size_ - batch; j < size_; ++j) {
        std::uniform_int_distribution<std::size_t> pick(0, j);
        const std::size_t t = pick(rng);
        if (std::find(out.begin(), out.end(), t) == out.end()) {
            out.push_back(t);
        } else {
            out.push_back(j);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// ReplayAgent

ReplayAgent::ReplayAgent(NetworkParameters params, AgentConfig config,
                         std::uint64_t seed)
    : params_(std::move(params)),
      config_(config),
      schedule_(config.schedule),
      buffer_(config.buffer_capacity),
      action_rng_(derive_seed(seed, kActionStream)),
      replay_rng_(derive_seed(seed, kReplayStream)) {
    config_.validate();
}

std::size_t ReplayAgent::act(std::span<const double> state) {
    return select_action(forward(params_, state).q, action_rng_);
}

void ReplayAgent::learn_from(const Transition& t) {
    GaussianVariable next_q;
    if (!t.terminal) {
        const GaussianVector q_next = forward(params_, t.next_state).q;
        next_q = q_next[select_action(q_next, action_rng_)];
    }
    const TDTarget target = td_target(t.reward, next_q, config_.gamma,
                                      schedule_.sigma_v(), t.terminal);
    const ForwardResult current = forward(params_, t.state);
    params_ = update(params_, current.trace, t.action, target);
}

void ReplayAgent::replay_step(const Transition& transition) {
    check_transition(transition, params_);
    const bool was_empty = buffer_.empty();
    buffer_.push(transition);
    if (was_empty) return;

    for (std::size_t idx :
         buffer_.sample_indices(config_.batch_size, replay_rng_)) {
        learn_from(buffer_[idx]);
    }
    schedule_ = decay_sigma_v(schedule_);
}

// ---------------------------------------------------------------------------
// NStepAgent

NStepAgent::NStepAgent(NetworkParameters params, AgentConfig config,
                       std::uint64_t seed)
    : params_(std::move(params)),
      config_(config),
      schedule_(config.schedule),
      action_rng_(derive_seed(seed, kActionStream)) {
    config_.validate();
    window_.reserve(config_.horizon);
}

std::size_t NStepAgent::act(std::span<const double> state) {
    return select_action(forward(params_, state).q, action_rng_);
}

void NStepAgent::nstep_step(const Transition& transition) {
    check_transition(transition, params_);
    window_.push_back(transition);
    if (transition.terminal || window_.size() >= config_.horizon) {
        flush();
    }
}

void NStepAgent::flush() {
    if (window_.empty()) return;
    const Transition& last = window_.back();
    GaussianVariable tail;
    if (!last.terminal) {
        const GaussianVector q_next = forward(params_, last.next_state).q;
        tail = q_next[select_action(q_next, action_rng_)];
    }
    std::vector<double> rewards;
    rewards.reserve(window_.size());
    for (const auto& t : window_) rewards.push_back(t.reward);

    std::vector<TDTarget> targets = nstep_targets(
        rewards, tail, config_.gamma, schedule_.sigma_v(), last.terminal);
    if (config_.normalize) {
        targets = normalize_returns(targets);
    }

    for (std::size_t j = window_.size(); j-- > 0;) {
        const ForwardResult current = forward(params_, window_[j].state);
        params_ = update(params_, current.trace, window_[j].action, targets[j]);
    }

    last_targets_ = std::move(targets);
    window_.clear();
    schedule_ = decay_sigma_v(schedule_);
}

}  // namespace tagirl
