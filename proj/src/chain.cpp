#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tagirl/envs.hpp"

namespace tagirl {

namespace {

struct Move {
    std::size_t next;
    double reward;
    bool terminal;
};

Move chain_move(const ChainMDPSpec& spec, std::size_t pos, std::size_t action) {
    const std::size_t goal = spec.length - 1;
    std::size_t next = pos;
    if (action == ChainMDP::kRight) {
        next = pos + 1;
    } else if (pos > 0) {
        next = pos - 1;
    }
    if (next == goal) return {next, spec.goal_reward, true};
    return {next, spec.step_reward, false};
}

void check_spec(const ChainMDPSpec& spec) {
    if (spec.length < 2) {
        throw std::invalid_argument("chain length must be at least 2");
    }
    if (!std::isfinite(spec.step_reward) || !std::isfinite(spec.goal_reward)) {
        throw std::invalid_argument("chain rewards must be finite");
    }
}

}  // namespace

ChainMDP::ChainMDP(ChainMDPSpec spec) : spec_(spec) { check_spec(spec_); }

std::vector<double> ChainMDP::encode(std::size_t position) const {
    std::vector<double> s(spec_.length, 0.0);
    s.at(position) = 1.0;
    return s;
}

std::vector<double> ChainMDP::reset(std::uint64_t /*seed*/) {
    position_ = 0;
    done_ = false;
    return encode(position_);
}

EnvObservation ChainMDP::step(std::size_t action) {
    if (done_) {
        throw std::logic_error("chain: step called on a finished episode");
    }
    if (action >= action_count()) {
        throw std::out_of_range("chain: action must be 0 or 1");
    }
    const Move m = chain_move(spec_, position_, action);
    position_ = m.next;
    done_ = m.terminal;
    return {encode(position_), m.reward, m.terminal};
}

QTable chain_q_oracle(const ChainMDPSpec& spec, double gamma) {
    check_spec(spec);
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("discount must lie in [0, 1)");
    }
    QTable q(spec.length, {0.0, 0.0});
    const std::size_t goal = spec.length - 1;
    for (int sweep = 0; sweep < 1000000; ++sweep) {
        double change = 0.0;
        QTable next = q;
        for (std::size_t s = 0; s < goal; ++s) {
            for (std::size_t a = 0; a < 2; ++a) {
                const Move m = chain_move(spec, s, a);
                const double boot =
                    m.terminal ? 0.0 : std::max(q[m.next][0], q[m.next][1]);
                next[s][a] = m.reward + gamma * boot;
                change = std::max(change, std::abs(next[s][a] - q[s][a]));
            }
        }
        q = std::move(next);
        if (change < 1e-12) break;
    }
    return q;
}

double chain_bellman_residual(const ChainMDPSpec& spec, double gamma,
                              const QTable& q) {
    check_spec(spec);
    if (q.size() != spec.length) {
        throw std::invalid_argument("Q table does not match the chain length");
    }
    double worst = 0.0;
    for (std::size_t s = 0; s + 1 < spec.length; ++s) {
        for (std::size_t a = 0; a < 2; ++a) {
            const Move m = chain_move(spec, s, a);
            const double boot =
                m.terminal ? 0.0 : std::max(q[m.next][0], q[m.next][1]);
            worst = std::max(worst,
                             std::abs(q[s][a] - (m.reward + gamma * boot)));
        }
    }
    return worst;
}

}  // namespace tagirl
