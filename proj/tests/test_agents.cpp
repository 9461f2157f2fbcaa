#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "tagirl/agents.hpp"
#include "tagirl/envs.hpp"
#include "tagirl/harness.hpp"
#include "tagirl/oracles.hpp"

using namespace tagirl;

namespace {

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

Transition sentinel(double id) { return {{id}, 0, id, {id}, false}; }

NetworkParameters small_net(std::size_t in, std::size_t out,
                            std::uint64_t seed) {
    const std::vector<LayerSpec> s{{in, 16, Activation::relu},
                                   {16, out, Activation::identity}};
    return init_parameters(s, seed);
}

}  // namespace

TEST_CASE("select_action with zero variances is the arg-max") {
    const GaussianVector q({1, 3, 2}, {0, 0, 0});
    CHECK(select_action(q, 1) == 1);
    CHECK(greedy_action(q) == 1);
    const GaussianVector tie({5, 5, 1}, {0, 0, 0});
    CHECK(select_action(tie, 9) == 0);
    CHECK(greedy_action(tie) == 0);

    Rng rng(2);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int k = 0; k < 200; ++k) {
        const GaussianVector g({u(rng), u(rng), u(rng), u(rng)}, {0, 0, 0, 0});
        CHECK(select_action(g, k) == greedy_action(g));
    }
    CHECK_THROWS(select_action(GaussianVector(), 1));
}

TEST_CASE("Thompson frequencies") {
    Rng rng(13);
    const int n = 100000;

    const GaussianVector even({0, 0}, {1, 1});
    int ones = 0;
    for (int k = 0; k < n; ++k) ones += select_action(even, rng) == 1;
    CHECK(std::abs(ones / double(n) - 0.5) < 0.01);

    const GaussianVector apart({0, 3}, {1, 1});
    ones = 0;
    for (int k = 0; k < n; ++k) ones += select_action(apart, rng) == 1;
    CHECK(std::abs(ones / double(n) - phi(3 / std::sqrt(2.0))) < 0.005);
    CHECK(phi(3 / std::sqrt(2.0)) == doctest::Approx(0.983).epsilon(0.001));
}

TEST_CASE("replay buffer is a FIFO of bounded size") {
    ReplayBuffer b(5);
    for (int k = 0; k < 5; ++k) b.push(sentinel(k));
    CHECK(b.size() == 5);
    CHECK(b[0].reward == 0);
    for (int k = 5; k < 8; ++k) b.push(sentinel(k));
    CHECK(b.size() == 5);
    // The three oldest are gone; order is oldest first.
    for (std::size_t i = 0; i < 5; ++i) CHECK(b[i].reward == 3.0 + i);
    CHECK_THROWS_AS(b[5], std::out_of_range);
    CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);
}

TEST_CASE("replay buffer sampling") {
    Rng rng(1);
    ReplayBuffer b(100);
    CHECK(b.sample_indices(4, rng).empty());
    b.push(sentinel(0));
    b.push(sentinel(1));
    // Fewer stored than requested: with replacement, full batch.
    const auto small = b.sample_indices(10, rng);
    CHECK(small.size() == 10);
    for (auto i : small) CHECK(i < 2);

    for (int k = 2; k < 50; ++k) b.push(sentinel(k));
    std::vector<int> hits(50, 0);
    for (int rep = 0; rep < 2000; ++rep) {
        auto idx = b.sample_indices(10, rng);
        std::sort(idx.begin(), idx.end());
        CHECK(std::adjacent_find(idx.begin(), idx.end()) == idx.end());
        for (auto i : idx) ++hits[i];
    }
    // 2000 * 10 / 50 = 400 expected hits per slot.
    for (int h : hits) CHECK(std::abs(h - 400) < 100);
}

TEST_CASE("first replay step only stores") {
    const auto p = small_net(2, 2, 3);
    ReplayAgent agent(p, AgentConfig::replay_defaults(), 1);
    agent.replay_step({{0.1, 0.2}, 1, 1.0, {0.3, 0.4}, false});
    CHECK(agent.parameters() == p);
    CHECK(agent.buffer().size() == 1);
    CHECK(agent.sigma_v() == 2.0);

    agent.replay_step({{0.3, 0.4}, 0, 1.0, {0.5, 0.6}, false});
    CHECK_FALSE(agent.parameters() == p);
    CHECK(agent.sigma_v() == doctest::Approx(1.9998));

    CHECK_THROWS(agent.replay_step({{0.1}, 0, 0.0, {0.1}, false}));
    CHECK_THROWS(agent.replay_step({{0.1, 0.2}, 5, 0.0, {0.1, 0.2}, false}));
}

TEST_CASE("one-state bandit with gamma 0 converges to the reward") {
    AgentConfig cfg = AgentConfig::replay_defaults();
    cfg.gamma = Discount(0.0);
    const std::vector<LayerSpec> s{{1, 8, Activation::relu},
                                   {8, 1, Activation::identity}};
    ReplayAgent agent(init_parameters(s, 4), cfg, 4);
    const std::vector<double> state{1.0};
    for (int k = 0; k < 500; ++k) {
        const auto a = agent.act(state);
        CHECK(a == 0);
        agent.observe({state, a, 1.0, state, false});
    }
    CHECK(forward(agent.parameters(), state).q.mean(0) ==
          doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("n-step agent with n = 1 equals replay of the latest transition") {
    const auto p = small_net(3, 2, 6);
    AgentConfig replay_cfg = AgentConfig::replay_defaults();
    replay_cfg.batch_size = 1;
    replay_cfg.buffer_capacity = 1;
    AgentConfig nstep_cfg = AgentConfig::nstep_defaults();
    nstep_cfg.horizon = 1;
    nstep_cfg.normalize = false;

    ReplayAgent replay(p, replay_cfg, 7);
    NStepAgent nstep(p, nstep_cfg, 7);

    // The replay agent's first step only fills its buffer; feed it a
    // throwaway transition so both start learning on the same one.
    replay.replay_step({{0, 0, 0}, 0, 0.0, {0, 0, 0}, false});
    REQUIRE(replay.parameters() == p);

    Rng rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 40; ++k) {
        const Transition t{{u(rng), u(rng), u(rng)}, static_cast<std::size_t>(k % 2),
                           u(rng), {u(rng), u(rng), u(rng)}, k % 9 == 8};
        replay.observe(t);
        nstep.observe(t);
        CHECK(replay.parameters() == nstep.parameters());
        CHECK(replay.sigma_v() == nstep.sigma_v());
    }
}

TEST_CASE("n-step window on a two-step episodic chain") {
    AgentConfig cfg = AgentConfig::nstep_defaults();
    cfg.horizon = 2;
    cfg.normalize = false;
    cfg.gamma = Discount(0.5);
    ChainMDP env({3, 1.0, 1.0});
    NStepAgent agent(small_net(3, 2, 2), cfg, 2);

    auto s = env.reset(0);
    auto o = env.step(ChainMDP::kRight);
    agent.observe({s, ChainMDP::kRight, o.reward, o.state, o.terminal});
    CHECK(agent.pending() == 1);
    s = o.state;
    o = env.step(ChainMDP::kRight);
    REQUIRE(o.terminal);
    agent.observe({s, ChainMDP::kRight, o.reward, o.state, o.terminal});
    CHECK(agent.pending() == 0);
    REQUIRE(agent.last_targets().size() == 2);
    CHECK(agent.last_targets()[0].mean == 1.5);
    CHECK(agent.last_targets()[1].mean == 1.0);
    // Terminal tail: noise only, sigma_v = 2 before the decay.
    CHECK(agent.last_targets()[1].noise_variance == doctest::Approx(4.0));
    CHECK(agent.last_targets()[0].noise_variance == doctest::Approx(5.0));
    CHECK(agent.sigma_v() == doctest::Approx(1.9998));
}

TEST_CASE("n-step agent flushes early on termination") {
    AgentConfig cfg = AgentConfig::nstep_defaults();
    cfg.horizon = 10;
    cfg.normalize = false;
    NStepAgent agent(small_net(2, 2, 1), cfg, 1);
    agent.observe({{0, 1}, 0, 1.0, {1, 0}, false});
    agent.observe({{1, 0}, 1, 1.0, {0, 1}, false});
    CHECK(agent.pending() == 2);
    agent.observe({{0, 1}, 1, 3.0, {1, 1}, true});
    CHECK(agent.pending() == 0);
    CHECK(agent.last_targets().size() == 3);
    CHECK(agent.last_targets()[2].mean == 3.0);
}

TEST_CASE("both agents learn the chain MDP") {
    const ChainMDPSpec spec{5, 0.0, 1.0};
    for (const char* kind : {"replay", "nstep"}) {
        const RunConfig config = oracle::chain_run_config(kind);
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            CAPTURE(kind);
            CAPTURE(seed);
            const auto out = oracle::train_on_chain(config, seed);
            CHECK(out.max_error <= 0.1);
            CHECK(out.bellman_residual <= 0.2);
        }
    }
}

TEST_CASE("a run is reproducible from its master seed") {
    RunConfig config;
    config.total_steps = 3000;
    auto record = [&](std::uint64_t seed) {
        CartPole env;
        auto agent = make_run_agent(config, env, seed);
        std::vector<double> returns;
        drive(*agent, env, config.total_steps, seed,
              [&](std::size_t, double r) { returns.push_back(r); });
        return std::make_pair(returns, agent->parameters());
    };
    const auto a = record(5);
    const auto b = record(5);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
    const auto c = record(6);
    CHECK_FALSE(c.second == a.second);
}
