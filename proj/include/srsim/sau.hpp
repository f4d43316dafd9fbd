#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "srsim/macsim.hpp"
#include "srsim/rng.hpp"
#include "srsim/transfer.hpp"

namespace srsim {

inline constexpr int kContextDim = 3;

std::array<double, kContextDim> context_features(const Context& ctx);

// Fully connected 3 -> hidden -> hidden -> K network, ReLU hidden layers,
// linear output. Layers are numbered 1..3 for transfer purposes.
class Mlp {
public:
    Mlp(int n_inputs, int n_hidden, int n_outputs);

    void init(Rng& rng); // uniform +-1/sqrt(fan_in) per layer, weights and biases
    void reinit_layer(int layer, Rng& rng);

    int n_inputs() const { return n_in_; }
    int n_hidden() const { return n_hid_; }
    int n_outputs() const { return n_out_; }
    static constexpr int n_layers() { return 3; }

    // Forward pass for all K outputs.
    void forward(std::span<const double> x, std::span<double> out) const;
    // Forward pass for a single output unit (cheaper during training).
    double forward_arm(std::span<const double> x, int arm,
                       std::span<double> h1, std::span<double> h2) const;

    // Accumulates the gradient of 0.5*(target - out_arm)^2 into `grads`
    // (same layout as parameters()); returns the prediction for `arm`.
    double accumulate_gradient(std::span<const double> x, int arm, double target,
                               std::span<double> grads,
                               std::span<double> h1, std::span<double> h2) const;

    std::vector<double>& parameters() { return params_; }
    const std::vector<double>& parameters() const { return params_; }
    std::size_t n_parameters() const { return params_.size(); }
    // [first, last) parameter range of a layer (weights then biases).
    std::pair<std::size_t, std::size_t> layer_range(int layer) const;
    int layer_fan_in(int layer) const;

    bool finite() const;

private:
    int n_in_, n_hid_, n_out_;
    std::vector<double> params_; // W1,b1,W2,b2,W3,b3 contiguous
    std::size_t w1_, b1_, w2_, b2_, w3_, b3_; // offsets
};

struct TrainerConfig {
    double learning_rate = 8e-3;  // RMSProp
    double rms_decay = 0.99;
    double rms_eps = 1e-8;
    double weight_decay = 5e-4;
    int batch_size = 64;
    int replay_capacity = 1024;
    int n_hidden = 100;
};

class RmsProp {
public:
    RmsProp(std::size_t n_params, const TrainerConfig& cfg);
    void step(std::span<double> params, std::span<const double> grads);
    void reset();
    std::vector<double>& state() { return mean_sq_; }
    const std::vector<double>& state() const { return mean_sq_; }

private:
    std::vector<double> mean_sq_;
    double lr_, decay_, eps_, weight_decay_;
};

struct Transition {
    std::array<double, kContextDim> context;
    int arm;
    double reward;
};

// SAU-Sampling contextual bandit agent: reward predictions from the MLP,
// frequentist exploration via per-arm cumulative squared prediction error.
class SauAgent {
public:
    SauAgent(int n_arms, const TrainerConfig& cfg, std::uint64_t seed);

    int select(const Context& ctx);
    void update(const Context& ctx, int arm, double reward);

    // Weight-transfer strategies: always resets exploration statistics, the replay
    // buffer and the warm-up counter; reinitializes layers per the strategy.
    void apply_transfer(const TransferStrategy& strategy);

    void predict(const Context& ctx, std::span<double> out) const;

    int n_arms() const { return n_arms_; }
    std::uint64_t t() const { return t_; }
    const std::vector<double>& j2() const { return j2_; }
    const std::vector<std::uint64_t>& n() const { return n_; }
    const Mlp& network() const { return net_; }
    Mlp& network() { return net_; }
    std::size_t replay_size() const { return replay_.size(); }

    void save(std::ostream& os) const; // versioned text checkpoint
    static SauAgent load(std::istream& is);

private:
    SauAgent(int n_arms, const TrainerConfig& cfg, Mlp net);
    void train_batch();

    int n_arms_;
    TrainerConfig cfg_;
    Mlp net_;
    RmsProp opt_;
    Rng rng_{0};
    std::vector<double> j2_;
    std::vector<std::uint64_t> n_;
    std::uint64_t t_ = 0;
    std::vector<Transition> replay_;
    std::size_t replay_next_ = 0;
    // scratch
    std::vector<double> grads_, h1_, h2_, preds_;
};

// Max relative error of the analytic gradient of 0.5*(r - mu_arm)^2 against
// central finite differences over a deterministic parameter subset.
double gradient_check(Mlp& net, std::span<const double> x, int arm, double target,
                      double h = 1e-5, std::size_t max_params = 512);

} // namespace srsim
