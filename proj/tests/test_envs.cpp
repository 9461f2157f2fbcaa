#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "tagirl/envs.hpp"
#include "tagirl/random.hpp"

using namespace tagirl;

namespace {

struct Row {
    int action;
    double x, x_dot, theta, theta_dot;
    int terminal;
};

// States after each step, produced by the reference CartPole-v0
// implementation (gymnasium 1.4, float64 internal state).
const Row kAlternating[] = {
    {0, 0, -0.1951219512195122, 0, 0.29268292682926828, 0},
    {1, -0.0039024390243902443, 0, 0.0058536585365853658, 0, 0},
    {0, -0.0039024390243902443, -0.19520540991454588, 0.0058536585365853658, 0.29452406408599713, 0},
    {1, -0.0078065472226811622, -0.00016740041965532249, 0.01174413981830531, 0.0036930278904273584, 0},
    {0, -0.007809895231074269, -0.19545579337635383, 0.011818000376113857, 0.30005811395683629, 0},
    {1, -0.011719011098601346, -0.00050426793520452762, 0.017819162655250582, 0.011125657739045003, 0},
    {0, -0.011729096457305436, -0.19587717709152444, 0.018041675810031483, 0.3093770528089681, 0},
    {1, -0.015646639999135924, -0.0010168696552273482, 0.024229216866210844, 0.022438125873968096, 0},
    {0, -0.015666977392240471, -0.19647776099710432, 0.024677979383690207, 0.32266610019293229, 0},
    {1, -0.019596532612182558, -0.0017157551152658657, 0.031131301387548854, 0.037866634333733384, 0},
    {0, -0.019630847714487875, -0.19726997975028471, 0.031888634074223522, 0.34020696486400598, 0},
    {1, -0.023576247309493571, -0.0026159266163472139, 0.03869277337150364, 0.057747997743014035, 0},
    {0, -0.023628565841820517, -0.19827068675892526, 0.039847733326363918, 0.36238331190652251, 0},
    {1, -0.027593979576999023, -0.003737091354998362, 0.047095399564494371, 0.082526688107356805, 0},
    {0, -0.027668721404098991, -0.19950140115090562, 0.048745933326641511, 0.38968849215588841, 0},
    {1, -0.031658749427117105, -0.0051039843348893166, 0.05653970316975928, 0.1127643682180885, 0},
    {0, -0.031760829113814892, -0.20098859951956027, 0.058794990534121051, 0.42273559000167593, 0},
    {1, -0.035780601104206097, -0.0067467428231038906, 0.067249702334154574, 0.14915202866403404, 0},
    {0, -0.035915535960668175, -0.20276402190639634, 0.070232742907435253, 0.46226984149371075, 0},
    {1, -0.0399708163987961, -0.0087012987975643996, 0.079478139737309467, 0.19252484806683934, 0},
    {0, -0.040144842374747386, -0.20486494113918627, 0.08332863669864625, 0.50918344015202821, 0},
    {1, -0.044242141197531115, -0.011009731851164439, 0.093512305501686821, 0.24387986827836711, 0},
    {0, -0.044462335834554403, -0.20733431188789822, 0.098389902867254159, 0.56453266546437619, 0},
    {1, -0.048609022072312366, -0.013720485878353034, 0.10968055617654168, 0.30439649534878938, 0},
    {0, -0.048883431789879424, -0.21022066393831773, 0.11576848608351747, 0.62955711199045405, 0},
};

// Start (0.01, -0.02, 0.03, 0.04), action 1 when 7t is divisible by 3.
const Row kIrregular[] = {
    {1, 0.0096000000000000009, 0.17467919574755525, 0.030799999999999998, -0.24306871796000809, 0},
    {0, 0.013093583914951107, -0.020868848948191993, 0.025938625640799837, 0.059167999939416599, 0},
    {0, 0.012676206935987267, -0.21635292104612766, 0.027121985639588168, 0.35992057137841382, 0},
    {1, 0.0083491485150647138, -0.021626799199488206, 0.034320397067156443, 0.075911698947444095, 0},
    {0, 0.0079166125310749496, -0.21722352452133115, 0.035838631046105324, 0.37922222636906866, 0},
    {0, 0.0035721420406483262, -0.41283561105439082, 0.043423075573486694, 0.682986244250536, 0},
    {1, -0.0046845701804394896, -0.21834268938267121, 0.057082800458497417, 0.4042842377174759, 0},
    {0, -0.0090514239680929143, -0.41422576455936411, 0.065168485212846933, 0.71440350538119679, 0},
    {0, -0.017335939259280196, -0.61018644847362535, 0.07945655532047087, 1.0268665544210274, 0},
    {1, -0.029539668228752702, -0.41620699735348748, 0.099993886408891425, 0.76015104372092268, 0},
    {0, -0.037863808175822453, -0.61255401798489173, 0.11519690728330988, 1.0825496146029017, 0},
    {0, -0.050114888535520291, -0.8089921681724288, 0.13684789957536792, 1.409046936156648, 0},
};

template <std::size_t N>
void replay(const CartPole::State& start, const Row (&rows)[N]) {
    CartPole env;
    env.set_state(start);
    for (std::size_t t = 0; t < N; ++t) {
        const Row& r = rows[t];
        const auto obs = env.step(static_cast<std::size_t>(r.action));
        CAPTURE(t);
        CHECK(std::abs(obs.state[0] - r.x) <= 1e-10);
        CHECK(std::abs(obs.state[1] - r.x_dot) <= 1e-10);
        CHECK(std::abs(obs.state[2] - r.theta) <= 1e-10);
        CHECK(std::abs(obs.state[3] - r.theta_dot) <= 1e-10);
        CHECK(obs.terminal == static_cast<bool>(r.terminal));
        CHECK(obs.reward == 1.0);
    }
}

}  // namespace

TEST_CASE("cartpole matches the reference trajectories") {
    replay({0, 0, 0, 0}, kAlternating);
    replay({0.01, -0.02, 0.03, 0.04}, kIrregular);
}

TEST_CASE("cartpole pushed right until the pole falls") {
    // Reference: terminal on step 9 at this state.
    CartPole env;
    env.set_state({0, 0, 0, 0});
    EnvObservation obs;
    int steps = 0;
    do {
        obs = env.step(1);
        ++steps;
    } while (!obs.terminal);
    CHECK(steps == 9);
    CHECK(std::abs(obs.state[0] - 0.14065097203306187) <= 1e-10);
    CHECK(std::abs(obs.state[1] - 1.7603811257683097) <= 1e-10);
    CHECK(std::abs(obs.state[2] - -0.21518604988500967) <= 1e-10);
    CHECK(std::abs(obs.state[3] - -2.7778864940128138) <= 1e-10);
    CHECK_THROWS_AS(env.step(0), std::logic_error);
}

TEST_CASE("cartpole termination rules") {
    const double deg13 = 13.0 * 3.141592653589793 / 180.0;
    CartPole env;
    env.set_state({0, 0, deg13, 0});
    CHECK(env.step(0).terminal);

    env.set_state({2.39, 1.0, 0, 0});
    CHECK(env.step(1).terminal);

    CHECK_THROWS_AS(CartPole().step(0), std::logic_error);
    env.reset(1);
    CHECK_THROWS_AS(env.step(2), std::out_of_range);
}

TEST_CASE("cartpole reset is seeded and small") {
    CartPole a, b;
    CHECK(a.reset(5) == b.reset(5));
    CHECK(a.reset(5) != a.reset(6));
    for (std::uint64_t s = 0; s < 200; ++s) {
        for (double v : a.reset(s)) {
            CHECK(v >= -0.05);
            CHECK(v <= 0.05);
        }
    }
}

TEST_CASE("cartpole episodes never exceed 200") {
    CartPole env;
    for (int e = 0; e < 20; ++e) {
        double total = 0;
        // A simple balancing rule keeps the pole up long enough to hit the cap.
        std::vector<double> s = env.reset(e);
        for (;;) {
            const std::size_t a = s[2] + 0.5 * s[3] > 0 ? 1 : 0;
            const auto obs = env.step(a);
            total += obs.reward;
            s = obs.state;
            if (obs.terminal) break;
        }
        CHECK(total <= 200.0);
        CHECK(env.elapsed_steps() <= CartPole::kMaxEpisodeSteps);
    }
    double total = 0;
    std::vector<double> s = env.reset(3);
    for (;;) {
        const auto obs = env.step(s[2] + 0.5 * s[3] > 0 ? 1 : 0);
        total += obs.reward;
        s = obs.state;
        if (obs.terminal) break;
    }
    CHECK(total == 200.0);
}

TEST_CASE("chain dynamics") {
    ChainMDP env({4, -0.1, 2.0});
    CHECK(env.reset(0) == std::vector<double>{1, 0, 0, 0});
    auto o = env.step(ChainMDP::kLeft);  // wall
    CHECK(env.position() == 0);
    CHECK(o.reward == -0.1);
    CHECK_FALSE(o.terminal);
    env.step(ChainMDP::kRight);
    env.step(ChainMDP::kRight);
    o = env.step(ChainMDP::kRight);
    CHECK(o.terminal);
    CHECK(o.reward == 2.0);
    CHECK(o.state == std::vector<double>{0, 0, 0, 1});
    CHECK_THROWS_AS(env.step(0), std::logic_error);
    CHECK_THROWS_AS(ChainMDP({1, 0, 1}), std::invalid_argument);
}

TEST_CASE("chain oracle values") {
    const auto two = chain_q_oracle({2, 0.0, 1.0}, 0.9);
    CHECK(two[0][ChainMDP::kRight] == doctest::Approx(1.0).epsilon(1e-12));

    // Four moves from state 0 to the goal at state 4; the reward arrives on
    // the fourth, so it is discounted three times.
    const auto five = chain_q_oracle({5, 0.0, 1.0}, 0.9);
    CHECK(five[0][ChainMDP::kRight] ==
          doctest::Approx(std::pow(0.9, 3)).epsilon(1e-12));
    CHECK(five[3][ChainMDP::kRight] == doctest::Approx(1.0).epsilon(1e-12));
    // Left at the wall stays put: one wasted step.
    CHECK(five[0][ChainMDP::kLeft] ==
          doctest::Approx(std::pow(0.9, 4)).epsilon(1e-12));
    CHECK(five[4][0] == 0.0);
    CHECK(five[4][1] == 0.0);
}

TEST_CASE("chain oracle is Bellman consistent for random specs") {
    Rng rng(8);
    std::uniform_int_distribution<std::size_t> len(2, 12);
    std::uniform_real_distribution<double> r(-1, 1);
    std::uniform_real_distribution<double> g(0, 0.99);
    for (int k = 0; k < 100; ++k) {
        const ChainMDPSpec spec{len(rng), r(rng), 5 * r(rng)};
        const double gamma = g(rng);
        const auto q = chain_q_oracle(spec, gamma);
        CHECK(chain_bellman_residual(spec, gamma, q) < 1e-10);
    }
}

TEST_CASE("make_environment") {
    CHECK(make_environment("cartpole")->state_dimension() == 4);
    const auto c = make_environment("chain", {7, 0, 1});
    CHECK(c->state_dimension() == 7);
    CHECK(c->action_count() == 2);
    CHECK_THROWS_AS(make_environment("lunar"), std::invalid_argument);
}
