#include "srsim/sau.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace srsim {

std::array<double, kContextDim> context_features(const Context& ctx) {
    return {ctx.starving_fraction, ctx.rssi_bucket, ctx.noise_scaled};
}

Mlp::Mlp(int n_inputs, int n_hidden, int n_outputs)
    : n_in_(n_inputs), n_hid_(n_hidden), n_out_(n_outputs) {
    if (n_inputs < 1 || n_hidden < 1 || n_outputs < 1)
        throw std::invalid_argument("mlp: all layer sizes must be >= 1");
    auto in = static_cast<std::size_t>(n_in_);
    auto hid = static_cast<std::size_t>(n_hid_);
    auto out = static_cast<std::size_t>(n_out_);
    w1_ = 0;
    b1_ = w1_ + hid * in;
    w2_ = b1_ + hid;
    b2_ = w2_ + hid * hid;
    w3_ = b2_ + hid;
    b3_ = w3_ + out * hid;
    params_.assign(b3_ + out, 0.0);
}

std::pair<std::size_t, std::size_t> Mlp::layer_range(int layer) const {
    switch (layer) {
        case 1: return {w1_, w2_};
        case 2: return {w2_, w3_};
        case 3: return {w3_, params_.size()};
        default: throw std::invalid_argument("mlp: layer must be in 1..3");
    }
}

int Mlp::layer_fan_in(int layer) const {
    switch (layer) {
        case 1: return n_in_;
        case 2: return n_hid_;
        case 3: return n_hid_;
        default: throw std::invalid_argument("mlp: layer must be in 1..3");
    }
}

void Mlp::reinit_layer(int layer, Rng& rng) {
    auto [first, last] = layer_range(layer);
    double nu = 1.0 / std::sqrt(static_cast<double>(layer_fan_in(layer)));
    std::uniform_real_distribution<double> u(-nu, nu);
    for (std::size_t i = first; i < last; ++i) params_[i] = u(rng);
}

void Mlp::init(Rng& rng) {
    for (int layer = 1; layer <= n_layers(); ++layer) reinit_layer(layer, rng);
}

void Mlp::forward(std::span<const double> x, std::span<double> out) const {
    const double* p = params_.data();
    const auto in = static_cast<std::size_t>(n_in_);
    const auto hid = static_cast<std::size_t>(n_hid_);
    const auto nout = static_cast<std::size_t>(n_out_);
    std::vector<double> h1(hid), h2(hid);
    for (std::size_t i = 0; i < hid; ++i) {
        double acc = p[b1_ + i];
        const double* w = p + w1_ + i * in;
        for (std::size_t j = 0; j < in; ++j) acc += w[j] * x[j];
        h1[i] = acc > 0.0 ? acc : 0.0;
    }
    for (std::size_t i = 0; i < hid; ++i) {
        double acc = p[b2_ + i];
        const double* w = p + w2_ + i * hid;
        for (std::size_t j = 0; j < hid; ++j) acc += w[j] * h1[j];
        h2[i] = acc > 0.0 ? acc : 0.0;
    }
    for (std::size_t k = 0; k < nout; ++k) {
        double acc = p[b3_ + k];
        const double* w = p + w3_ + k * hid;
        for (std::size_t j = 0; j < hid; ++j) acc += w[j] * h2[j];
        out[k] = acc;
    }
}

double Mlp::forward_arm(std::span<const double> x, int arm,
                        std::span<double> h1, std::span<double> h2) const {
    const double* p = params_.data();
    const auto in = static_cast<std::size_t>(n_in_);
    const auto hid = static_cast<std::size_t>(n_hid_);
    for (std::size_t i = 0; i < hid; ++i) {
        double acc = p[b1_ + i];
        const double* w = p + w1_ + i * in;
        for (std::size_t j = 0; j < in; ++j) acc += w[j] * x[j];
        h1[i] = acc > 0.0 ? acc : 0.0;
    }
    for (std::size_t i = 0; i < hid; ++i) {
        double acc = p[b2_ + i];
        const double* w = p + w2_ + i * hid;
        for (std::size_t j = 0; j < hid; ++j) acc += w[j] * h1[j];
        h2[i] = acc > 0.0 ? acc : 0.0;
    }
    const auto a = static_cast<std::size_t>(arm);
    double acc = p[b3_ + a];
    const double* w = p + w3_ + a * hid;
    for (std::size_t j = 0; j < hid; ++j) acc += w[j] * h2[j];
    return acc;
}

double Mlp::accumulate_gradient(std::span<const double> x, int arm, double target,
                                std::span<double> grads,
                                std::span<double> h1, std::span<double> h2) const {
    double pred = forward_arm(x, arm, h1, h2);
    const double* p = params_.data();
    double* g = grads.data();
    const auto in = static_cast<std::size_t>(n_in_);
    const auto hid = static_cast<std::size_t>(n_hid_);
    const auto a = static_cast<std::size_t>(arm);

    const double d_out = pred - target; // d(0.5*(target-pred)^2)/d(pred)
    g[b3_ + a] += d_out;
    {
        double* gw = g + w3_ + a * hid;
        for (std::size_t j = 0; j < hid; ++j) gw[j] += d_out * h2[j];
    }
    // delta at hidden layer 2
    std::vector<double> dh2(hid);
    {
        const double* w = p + w3_ + a * hid;
        for (std::size_t j = 0; j < hid; ++j) dh2[j] = h2[j] > 0.0 ? d_out * w[j] : 0.0;
    }
    std::vector<double> dh1(hid, 0.0);
    for (std::size_t i = 0; i < hid; ++i) {
        double di = dh2[i];
        if (di == 0.0) continue;
        g[b2_ + i] += di;
        double* gw = g + w2_ + i * hid;
        const double* w = p + w2_ + i * hid;
        for (std::size_t j = 0; j < hid; ++j) {
            gw[j] += di * h1[j];
            dh1[j] += di * w[j];
        }
    }
    for (std::size_t i = 0; i < hid; ++i) {
        if (h1[i] <= 0.0 || dh1[i] == 0.0) continue;
        g[b1_ + i] += dh1[i];
        double* gw = g + w1_ + i * in;
        for (std::size_t j = 0; j < in; ++j) gw[j] += dh1[i] * x[j];
    }
    return pred;
}

bool Mlp::finite() const {
    return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
}

RmsProp::RmsProp(std::size_t n_params, const TrainerConfig& cfg)
    : mean_sq_(n_params, 0.0), lr_(cfg.learning_rate), decay_(cfg.rms_decay),
      eps_(cfg.rms_eps), weight_decay_(cfg.weight_decay) {
    if (lr_ <= 0.0) throw std::invalid_argument("trainer: learning rate must be > 0");
}

void RmsProp::step(std::span<double> params, std::span<const double> grads) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        double g = grads[i] + weight_decay_ * params[i];
        mean_sq_[i] = decay_ * mean_sq_[i] + (1.0 - decay_) * g * g;
        params[i] -= lr_ * g / (std::sqrt(mean_sq_[i]) + eps_);
    }
}

void RmsProp::reset() { std::fill(mean_sq_.begin(), mean_sq_.end(), 0.0); }

SauAgent::SauAgent(int n_arms, const TrainerConfig& cfg, std::uint64_t seed)
    : SauAgent(n_arms, cfg, Mlp(kContextDim, cfg.n_hidden, n_arms)) {
    rng_ = Rng(seed);
    net_.init(rng_);
}

SauAgent::SauAgent(int n_arms, const TrainerConfig& cfg, Mlp net)
    : n_arms_(n_arms), cfg_(cfg), net_(std::move(net)), opt_(net_.n_parameters(), cfg),
      j2_(static_cast<std::size_t>(n_arms), 1.0),
      n_(static_cast<std::size_t>(n_arms), 0) {
    if (n_arms < 1) throw std::invalid_argument("sau: need at least one arm");
    if (cfg.batch_size < 1) throw std::invalid_argument("trainer: batch size must be >= 1");
    replay_.reserve(static_cast<std::size_t>(cfg_.replay_capacity));
    grads_.assign(net_.n_parameters(), 0.0);
    h1_.assign(static_cast<std::size_t>(net_.n_hidden()), 0.0);
    h2_.assign(static_cast<std::size_t>(net_.n_hidden()), 0.0);
    preds_.assign(static_cast<std::size_t>(n_arms), 0.0);
}

void SauAgent::predict(const Context& ctx, std::span<double> out) const {
    auto x = context_features(ctx);
    for (double v : x)
        if (!std::isfinite(v)) throw std::invalid_argument("sau: non-finite context");
    net_.forward(x, out);
}

int SauAgent::select(const Context& ctx) {
    t_ += 1;
    if (t_ <= static_cast<std::uint64_t>(n_arms_))
        return std::uniform_int_distribution<int>(0, n_arms_ - 1)(rng_);
    for (int a = 0; a < n_arms_; ++a)
        if (n_[static_cast<std::size_t>(a)] == 0) return a; // unvisited after warm-up
    predict(ctx, preds_);
    double best = -std::numeric_limits<double>::infinity();
    int best_arm = 0;
    for (int a = 0; a < n_arms_; ++a) {
        auto ai = static_cast<std::size_t>(a);
        // tau^2 = J^2/n sampled with variance tau^2/n
        double stddev = std::sqrt(j2_[ai]) / static_cast<double>(n_[ai]);
        double sample = preds_[ai] + stddev * std::normal_distribution<double>(0.0, 1.0)(rng_);
        if (sample > best) {
            best = sample;
            best_arm = a;
        }
    }
    return best_arm;
}

void SauAgent::update(const Context& ctx, int arm, double reward) {
    if (!std::isfinite(reward)) throw std::invalid_argument("sau: non-finite reward");
    if (arm < 0 || arm >= n_arms_) throw std::invalid_argument("sau: invalid arm");
    auto x = context_features(ctx);
    double pred = net_.forward_arm(x, arm, h1_, h2_);
    double err = reward - pred;
    j2_[static_cast<std::size_t>(arm)] += err * err; // before the gradient step
    n_[static_cast<std::size_t>(arm)] += 1;

    Transition tr{x, arm, reward};
    if (replay_.size() < static_cast<std::size_t>(cfg_.replay_capacity)) {
        replay_.push_back(tr);
    } else {
        replay_[replay_next_] = tr;
        replay_next_ = (replay_next_ + 1) % replay_.size();
    }
    train_batch();
}

void SauAgent::train_batch() {
    std::fill(grads_.begin(), grads_.end(), 0.0);
    std::uniform_int_distribution<std::size_t> pick(0, replay_.size() - 1);
    const int batch = cfg_.batch_size;
    for (int b = 0; b < batch; ++b) {
        const Transition& tr = replay_[pick(rng_)];
        net_.accumulate_gradient(tr.context, tr.arm, tr.reward, grads_, h1_, h2_);
    }
    double scale = 1.0 / static_cast<double>(batch);
    for (double& g : grads_) g *= scale;
    opt_.step(net_.parameters(), grads_);
}

void SauAgent::apply_transfer(const TransferStrategy& strategy) {
    strategy.validate(Mlp::n_layers());
    switch (strategy.kind) {
        case TransferKind::forget:
            for (int layer = 1; layer <= Mlp::n_layers(); ++layer) net_.reinit_layer(layer, rng_);
            break;
        case TransferKind::full_transfer:
            break; // parameters carried over unchanged
        case TransferKind::partial_transfer:
            for (int layer = 1; layer <= Mlp::n_layers(); ++layer) {
                bool kept = std::find(strategy.layers.begin(), strategy.layers.end(), layer) !=
                            strategy.layers.end();
                if (!kept) net_.reinit_layer(layer, rng_);
            }
            break;
    }
    std::fill(j2_.begin(), j2_.end(), 1.0);
    std::fill(n_.begin(), n_.end(), 0);
    t_ = 0; // restart forced exploration
    replay_.clear();
    replay_next_ = 0;
    opt_.reset();
}

namespace {

void write_double(std::ostream& os, double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%a", v);
    os << buf << '\n';
}

double read_double(std::istream& is) {
    std::string tok;
    if (!(is >> tok)) throw std::runtime_error("sau checkpoint: truncated");
    return std::strtod(tok.c_str(), nullptr);
}

} // namespace

void SauAgent::save(std::ostream& os) const {
    os << "sau-checkpoint v1\n";
    os << n_arms_ << ' ' << net_.n_inputs() << ' ' << net_.n_hidden() << ' ' << net_.n_outputs()
       << '\n';
    os << cfg_.learning_rate << ' ' << cfg_.rms_decay << ' ' << cfg_.rms_eps << ' '
       << cfg_.weight_decay << ' ' << cfg_.batch_size << ' ' << cfg_.replay_capacity << ' '
       << cfg_.n_hidden << '\n';
    os << t_ << '\n';
    for (double v : net_.parameters()) write_double(os, v);
    for (double v : j2_) write_double(os, v);
    for (auto v : n_) os << v << '\n';
    os << replay_.size() << ' ' << replay_next_ << '\n';
    for (const auto& tr : replay_) {
        for (double v : tr.context) write_double(os, v);
        os << tr.arm << '\n';
        write_double(os, tr.reward);
    }
    for (double v : opt_.state()) write_double(os, v);
    os << rng_ << '\n';
}

SauAgent SauAgent::load(std::istream& is) {
    std::string magic, version;
    is >> magic >> version;
    if (magic != "sau-checkpoint" || version != "v1")
        throw std::runtime_error("sau checkpoint: unrecognized header");
    int n_arms, n_in, n_hid, n_out;
    is >> n_arms >> n_in >> n_hid >> n_out;
    TrainerConfig cfg;
    is >> cfg.learning_rate >> cfg.rms_decay >> cfg.rms_eps >> cfg.weight_decay >>
        cfg.batch_size >> cfg.replay_capacity >> cfg.n_hidden;
    if (n_in != kContextDim || n_hid != cfg.n_hidden || n_out != n_arms)
        throw std::runtime_error("sau checkpoint: inconsistent shapes");
    SauAgent agent(n_arms, cfg, Mlp(n_in, n_hid, n_out));
    is >> agent.t_;
    for (double& v : agent.net_.parameters()) v = read_double(is);
    for (double& v : agent.j2_) v = read_double(is);
    for (auto& v : agent.n_) is >> v;
    std::size_t replay_size;
    is >> replay_size >> agent.replay_next_;
    agent.replay_.resize(replay_size);
    for (auto& tr : agent.replay_) {
        for (double& v : tr.context) v = read_double(is);
        is >> tr.arm;
        tr.reward = read_double(is);
    }
    for (double& v : agent.opt_.state()) v = read_double(is);
    is >> agent.rng_;
    if (!is) throw std::runtime_error("sau checkpoint: truncated");
    return agent;
}

double gradient_check(Mlp& net, std::span<const double> x, int arm, double target,
                      double h, std::size_t max_params) {
    std::vector<double> grads(net.n_parameters(), 0.0);
    std::vector<double> h1(static_cast<std::size_t>(net.n_hidden()));
    std::vector<double> h2(static_cast<std::size_t>(net.n_hidden()));
    net.accumulate_gradient(x, arm, target, grads, h1, h2);

    auto loss = [&]() {
        double pred = net.forward_arm(x, arm, h1, h2);
        double e = target - pred;
        return 0.5 * e * e;
    };
    std::size_t n = net.n_parameters();
    std::size_t stride = std::max<std::size_t>(1, n / max_params);
    double max_rel = 0.0;
    auto& params = net.parameters();
    for (std::size_t i = 0; i < n; i += stride) {
        double orig = params[i];
        params[i] = orig + h;
        double lp = loss();
        params[i] = orig - h;
        double lm = loss();
        params[i] = orig;
        double numeric = (lp - lm) / (2.0 * h);
        double rel = std::abs(numeric - grads[i]) /
                     std::max({std::abs(numeric), std::abs(grads[i]), 1e-5});
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

} // namespace srsim
