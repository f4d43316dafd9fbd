#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <sstream>
#include <vector>

#include "oracle.hpp"
#include "srsim/sau.hpp"

using namespace srsim;
using doctest::Approx;

namespace {

TrainerConfig small_trainer() {
    TrainerConfig cfg;
    cfg.n_hidden = 8;
    return cfg;
}

void zero_output_layer(Mlp& net) {
    auto [first, last] = net.layer_range(3);
    for (std::size_t i = first; i < last; ++i) net.parameters()[i] = 0.0;
}

} // namespace

TEST_CASE("context features keep the documented order") {
    auto x = context_features(Context{0.4, 0.75, -0.94});
    CHECK(x[0] == 0.4);
    CHECK(x[1] == 0.75);
    CHECK(x[2] == -0.94);
}

TEST_CASE("prediction basics") {
    SauAgent agent(4, small_trainer(), 99);
    Context ctx{0.2, 0.5, -0.94};

    SUBCASE("zeroed output layer predicts zero everywhere") {
        zero_output_layer(agent.network());
        std::vector<double> out(4);
        agent.predict(ctx, out);
        for (double v : out) CHECK(v == 0.0);
    }
    SUBCASE("prediction is deterministic") {
        std::vector<double> a(4), b(4);
        agent.predict(ctx, a);
        agent.predict(ctx, b);
        CHECK(a == b);
    }
    SUBCASE("non-finite context is rejected") {
        std::vector<double> out(4);
        Context bad{std::nan(""), 0.5, -0.94};
        CHECK_THROWS_AS(agent.predict(bad, out), std::invalid_argument);
    }
}

TEST_CASE("hand-computed forward pass of a one-unit-per-layer network") {
    Mlp net(2, 1, 1);
    auto& p = net.parameters();
    // layout: W1 (1x2), b1, W2 (1x1), b2, W3 (1x1), b3
    p = {0.5, -1.0, 0.25, 2.0, -0.5, 3.0, 0.75};
    std::vector<double> x{2.0, 0.5};
    // h1 = relu(0.5*2 - 1.0*0.5 + 0.25) = 0.75
    // h2 = relu(2*0.75 - 0.5) = 1.0
    // out = 3*1.0 + 0.75 = 3.75
    std::vector<double> out(1);
    net.forward(x, out);
    CHECK(out[0] == Approx(3.75).epsilon(1e-12));
}

TEST_CASE("warm-up selection is uniform") {
    std::vector<std::uint64_t> counts(5, 0);
    for (int i = 0; i < 20000; ++i) {
        SauAgent agent(5, small_trainer(), 1000 + i);
        Context ctx{0.0, 0.5, -0.94};
        for (int t = 0; t < 5; ++t) counts[agent.select(ctx)]++;
    }
    CHECK(testing::chi_square_uniform(counts) < 13.277); // chi2(df=4, p=0.01)
}

TEST_CASE("equal predictions and stats split selection evenly") {
    TrainerConfig cfg = small_trainer();
    cfg.learning_rate = 1e-12; // keep the network essentially frozen
    SauAgent agent(2, cfg, 4242);
    Context ctx{0.0, 0.5, -0.94};
    std::vector<double> preds(2);

    // one zero-error update per arm: J^2 stays 1, n becomes 1
    for (int arm = 0; arm < 2; ++arm) {
        agent.select(ctx);
        agent.predict(ctx, preds);
        agent.update(ctx, arm, preds[arm]);
    }
    zero_output_layer(agent.network()); // mu-hat exactly {0, 0}

    int first = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) first += agent.select(ctx) == 0;
    double freq = static_cast<double>(first) / draws;
    CHECK(freq == Approx(0.5).epsilon(0.02));
}

TEST_CASE("vanishing variance collapses onto the argmax prediction") {
    TrainerConfig cfg = small_trainer();
    cfg.learning_rate = 1e-12;
    SauAgent agent(2, cfg, 77);
    Context ctx{0.0, 0.5, -0.94};
    std::vector<double> preds(2);
    for (int i = 0; i < 2000; ++i) {
        int arm = i % 2;
        agent.select(ctx);
        agent.predict(ctx, preds);
        agent.update(ctx, arm, preds[arm]); // zero error: J^2 ~ 1, n grows
    }
    zero_output_layer(agent.network());
    auto [first, last] = agent.network().layer_range(3);
    agent.network().parameters()[last - 1] = 1.0; // bias of arm 1 -> mu-hat {0, 1}
    int hits = 0;
    for (int i = 0; i < 1000; ++i) hits += agent.select(ctx) == 1;
    CHECK(hits >= 999);
}

TEST_CASE("update maintains the exploration statistics") {
    SauAgent agent(3, small_trainer(), 7);
    Context ctx{0.1, 0.25, -0.94};
    std::vector<double> preds(3);

    agent.predict(ctx, preds);
    agent.update(ctx, 1, preds[1]); // e = 0
    CHECK(agent.j2()[1] == Approx(1.0));
    CHECK(agent.n()[1] == 1);

    agent.predict(ctx, preds);
    agent.update(ctx, 1, preds[1] + 0.5); // e = 0.5
    CHECK(agent.j2()[1] == Approx(1.25));
    CHECK(agent.n()[1] == 2);

    // J^2 never decreases, n counts updates exactly
    Rng rng = make_rng(7, 0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::uint64_t> expected_n = {0, 2, 0};
    std::vector<double> last_j2(agent.j2().begin(), agent.j2().end());
    for (int i = 0; i < 200; ++i) {
        int arm = i % 3;
        agent.update(ctx, arm, u(rng));
        expected_n[arm]++;
        CHECK(agent.j2()[arm] >= last_j2[arm]);
        last_j2[arm] = agent.j2()[arm];
        CHECK(agent.n()[arm] == expected_n[arm]);
    }
    CHECK(agent.network().finite());
}

TEST_CASE("repeated training on a frozen transition descends") {
    TrainerConfig cfg = small_trainer();
    cfg.learning_rate = 1e-4;
    cfg.batch_size = 1;
    SauAgent agent(2, cfg, 31);
    Context ctx{0.6, 0.75, -0.94};
    const double target = 5.0; // far from the initial prediction
    std::vector<double> preds(2);

    agent.predict(ctx, preds);
    double prev_loss = 0.5 * (target - preds[0]) * (target - preds[0]);
    for (int i = 0; i < 100; ++i) {
        agent.update(ctx, 0, target);
        agent.predict(ctx, preds);
        double loss = 0.5 * (target - preds[0]) * (target - preds[0]);
        CHECK(loss < prev_loss);
        prev_loss = loss;
    }
}

TEST_CASE("analytic gradients match finite differences") {
    Rng rng = make_rng(13, 0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        Mlp net(kContextDim, 16, 5);
        net.init(rng);
        std::vector<double> x{u(rng), u(rng), u(rng)};
        int arm = i % 5;
        double target = u(rng);
        CHECK(gradient_check(net, x, arm, target) < 1e-4);
    }
}

TEST_CASE("zero error yields a zero gradient") {
    Rng rng = make_rng(13, 1);
    Mlp net(kContextDim, 16, 3);
    net.init(rng);
    std::vector<double> x{0.3, 0.5, -0.94};
    std::vector<double> h1(16), h2(16);
    double pred = net.forward_arm(x, 1, h1, h2);
    std::vector<double> grads(net.n_parameters(), 0.0);
    net.accumulate_gradient(x, 1, pred, grads, h1, h2);
    for (double g : grads) CHECK(std::abs(g) < 1e-10);
}

TEST_CASE("gradient is linear in the prediction error") {
    Rng rng = make_rng(13, 2);
    Mlp net(kContextDim, 16, 3);
    net.init(rng);
    std::vector<double> x{0.3, 0.25, -0.94};
    std::vector<double> h1(16), h2(16);
    double pred = net.forward_arm(x, 0, h1, h2);
    std::vector<double> g1(net.n_parameters(), 0.0), g2(net.n_parameters(), 0.0);
    net.accumulate_gradient(x, 0, pred - 0.3, g1, h1, h2);
    net.accumulate_gradient(x, 0, pred - 0.6, g2, h1, h2);
    for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g2[i] == Approx(2.0 * g1[i]).epsilon(1e-9));
}

TEST_CASE("checkpoint restores the agent bit-exactly") {
    SauAgent agent(4, small_trainer(), 555);
    Context ctx{0.2, 0.5, -0.94};
    Rng rng = make_rng(555, 9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        int arm = agent.select(ctx);
        agent.update(ctx, arm, u(rng));
    }

    std::stringstream saved;
    agent.save(saved);
    SauAgent restored = SauAgent::load(saved);

    std::stringstream again;
    restored.save(again);
    CHECK(saved.str() == again.str());

    // both continue with identical draws and identical training
    for (int i = 0; i < 30; ++i) {
        Context c{u(rng), 0.25, -0.94};
        int a1 = agent.select(c);
        int a2 = restored.select(c);
        CHECK(a1 == a2);
        double r = u(rng);
        agent.update(c, a1, r);
        restored.update(c, a2, r);
    }
    CHECK(agent.network().parameters() == restored.network().parameters());
}
