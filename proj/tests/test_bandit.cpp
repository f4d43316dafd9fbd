#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "oracle.hpp"
#include "srsim/bandit.hpp"

using namespace srsim;
using doctest::Approx;

// chi-square critical values at p = 0.01
constexpr double kChi2Crit9 = 21.666;  // df = 9
constexpr double kChi2Crit4 = 13.277;  // df = 4

TEST_CASE("arm grid construction") {
    ArmGrid grid = ArmGrid::build(-82.0, -62.0, 21, 1.0, 21.0, 21);
    REQUIRE(grid.size() == 441);
    CHECK(grid.arms.front().p_cs_dbm == -82.0);
    CHECK(grid.arms.front().p_tx_dbm == 1.0);
    CHECK(grid.arms.back().p_cs_dbm == -62.0);
    CHECK(grid.arms.back().p_tx_dbm == 21.0);
    // cs-major indexing: arm k = i_cs * L_tx + i_tx
    CHECK(grid.arms[21].p_cs_dbm == Approx(-81.0));
    CHECK(grid.arms[21].p_tx_dbm == Approx(1.0));
    // uniform spacing
    for (std::size_t i = 1; i < grid.cs_dbm.size(); ++i)
        CHECK(grid.cs_dbm[i] - grid.cs_dbm[i - 1] == Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 1; i < grid.tx_dbm.size(); ++i)
        CHECK(grid.tx_dbm[i] - grid.tx_dbm[i - 1] == Approx(1.0).epsilon(1e-12));

    ArmGrid single = ArmGrid::build(-82.0, -62.0, 1, 1.0, 21.0, 1);
    REQUIRE(single.size() == 1);
    CHECK(single.arms[0].p_cs_dbm == -82.0);
    CHECK(single.arms[0].p_tx_dbm == 1.0);

    ArmGrid reduced = ArmGrid::reduced();
    REQUIRE(reduced.size() == 7);
    for (const auto& a : reduced.arms) CHECK(a.p_cs_dbm == -82.0);
    CHECK(reduced.arms.front().p_tx_dbm == 15.0);
    CHECK(reduced.arms.back().p_tx_dbm == 21.0);

    CHECK_THROWS_AS(ArmGrid::build(-62.0, -82.0, 21, 1.0, 21.0, 21), std::invalid_argument);
}

TEST_CASE("epsilon-greedy selection") {
    SUBCASE("pure exploitation") {
        EpsilonGreedy agent(3, 0.0);
        agent.update(1, 1.0);
        Rng rng = make_rng(5, 0);
        for (int i = 0; i < 100; ++i) CHECK(agent.select(10, rng) == 1);
    }
    SUBCASE("ties break toward the lowest index") {
        EpsilonGreedy agent(3, 0.0);
        Rng rng = make_rng(5, 1);
        CHECK(agent.select(1, rng) == 0);
    }
    SUBCASE("full exploration is uniform") {
        EpsilonGreedy agent(10, 1.0);
        Rng rng = make_rng(5, 2);
        std::vector<std::uint64_t> counts(10, 0);
        for (int i = 0; i < 100000; ++i) counts[agent.select(1, rng)]++;
        CHECK(testing::chi_square_uniform(counts) < kChi2Crit9);
    }
    SUBCASE("annealing is nonincreasing toward zero") {
        double prev = 1.0;
        for (std::uint64_t t = 1; t <= 1000000; t *= 10) {
            double eps = annealed_epsilon(1.0, t);
            CHECK(eps <= prev);
            prev = eps;
        }
        CHECK(prev < 1e-2);
    }
}

TEST_CASE("epsilon-greedy sample-average update") {
    EpsilonGreedy agent(2);
    agent.update(0, 0.7);
    CHECK(agent.q()[0] == Approx(0.7));

    agent.update(1, 1.0);
    agent.update(1, 0.0);
    CHECK(agent.q()[1] == Approx(0.5));

    EpsilonGreedy three(1);
    three.update(0, 0.2);
    three.update(0, 0.4);
    three.update(0, 0.9);
    CHECK(three.q()[0] == Approx(0.5));
    CHECK(three.n()[0] == 3);

    // Q tracks the arithmetic mean of the rewards exactly
    EpsilonGreedy mean_test(1);
    Rng rng = make_rng(5, 3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double sum = 0.0;
    for (int i = 1; i <= 500; ++i) {
        double r = u(rng);
        sum += r;
        mean_test.update(0, r);
        CHECK(mean_test.q()[0] == Approx(sum / i).epsilon(1e-12));
    }
}

TEST_CASE("reward-cooperative update blends the other agents' rewards") {
    EpsilonGreedy a(2), b(2);
    a.update(0, 0.5);
    b.coop_update(0, 0.5, std::vector<double>{}, 0.0);
    CHECK(a.q()[0] == b.q()[0]);

    EpsilonGreedy c(2);
    c.coop_update(0, 0.5, std::vector<double>{0.2, 0.8}, 1.0);
    CHECK(c.q()[0] == Approx(1.0));

    EpsilonGreedy d(2);
    d.coop_update(0, 0.6, std::vector<double>{0.6, 0.6}, 0.5);
    CHECK(d.q()[0] == Approx(0.6 * 1.5));

    EpsilonGreedy lone(2);
    CHECK_THROWS_AS(lone.coop_update(0, 0.5, std::vector<double>{}, 0.5), std::invalid_argument);
}

TEST_CASE("UCB selection") {
    SUBCASE("warm-up pulls every arm in index order") {
        Ucb agent(5);
        for (int t = 1; t <= 5; ++t) {
            int arm = agent.select(t);
            CHECK(arm == t - 1);
            agent.update(arm, 0.5);
        }
    }
    SUBCASE("uncertainty bonus dominates a tied mean") {
        Ucb agent(2, 1.0);
        for (int i = 0; i < 100; ++i) agent.update(0, 0.5);
        agent.update(1, 0.5);
        CHECK(agent.select(101) == 1);
    }
    SUBCASE("c = 0 is pure exploitation after warm-up") {
        Ucb agent(2, 0.0);
        agent.update(0, 0.9);
        agent.update(1, 0.1);
        CHECK(agent.select(3) == 0);
    }
}

TEST_CASE("Thompson sampling") {
    SUBCASE("uniform priors select uniformly") {
        Thompson agent(5);
        Rng rng = make_rng(5, 4);
        std::vector<std::uint64_t> counts(5, 0);
        for (int i = 0; i < 100000; ++i) counts[agent.select(rng)]++;
        CHECK(testing::chi_square_uniform(counts) < kChi2Crit4);
    }
    SUBCASE("a strongly favored posterior dominates selection") {
        Thompson agent(3);
        Rng rng = make_rng(5, 5);
        for (int i = 0; i < 99; ++i) agent.update(0, 1.0, rng); // alpha -> 100
        int hits = 0;
        for (int i = 0; i < 1000; ++i) hits += agent.select(rng) == 0;
        CHECK(hits > 900);
    }
    SUBCASE("deterministic reward 1 grows alpha by one per update") {
        Thompson agent(2);
        Rng rng = make_rng(5, 6);
        for (int i = 1; i <= 10; ++i) {
            agent.update(1, 1.0, rng);
            CHECK(agent.alpha()[1] == Approx(1.0 + i));
            CHECK(agent.beta()[1] == Approx(1.0));
        }
    }
    SUBCASE("posterior mass counts the updates") {
        Thompson agent(1);
        Rng rng = make_rng(5, 7);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 1; i <= 200; ++i) {
            agent.update(0, u(rng), rng);
            CHECK(agent.alpha()[0] + agent.beta()[0] - 2.0 == Approx(i));
        }
    }
}

TEST_CASE("regret accounting") {
    RegretLedger best({0.9, 0.5});
    for (int i = 0; i < 100; ++i) best.record(0);
    CHECK(best.cumulative == Approx(0.0));

    RegretLedger worst({0.9, 0.5});
    for (int i = 0; i < 100; ++i) worst.record(1);
    CHECK(worst.cumulative == Approx(0.4 * 100));

    // uniform random policy: E[R_T] = 0.2 T, checked within 3 binomial sigmas
    RegretLedger uniform({0.9, 0.5});
    Rng rng = make_rng(5, 8);
    std::uniform_int_distribution<int> pick(0, 1);
    const int T = 10000;
    for (int i = 0; i < T; ++i) uniform.record(pick(rng));
    double sigma = 0.4 * std::sqrt(T * 0.25);
    CHECK(std::abs(uniform.cumulative - 0.2 * T) < 3.0 * sigma);
}
