#include "srsim/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srsim {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw std::invalid_argument("arm grid: need at least one level per axis");
    if (lo > hi) throw std::invalid_argument("arm grid: min must be <= max");
    std::vector<double> out(static_cast<std::size_t>(n));
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    double step = (hi - lo) / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + step * i;
    out.back() = hi; // exact endpoint
    return out;
}

template <typename T>
int argmax_lowest(const std::vector<T>& v) {
    return static_cast<int>(std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}

} // namespace

ArmGrid ArmGrid::build(double cs_min, double cs_max, int l_cs,
                       double tx_min, double tx_max, int l_tx) {
    ArmGrid grid;
    grid.cs_dbm = linspace(cs_min, cs_max, l_cs);
    grid.tx_dbm = linspace(tx_min, tx_max, l_tx);
    grid.arms.reserve(grid.cs_dbm.size() * grid.tx_dbm.size());
    for (double cs : grid.cs_dbm)
        for (double tx : grid.tx_dbm)
            grid.arms.push_back({tx, cs});
    return grid;
}

ArmGrid ArmGrid::reduced() { return build(-82.0, -82.0, 1, 15.0, 21.0, 7); }

ArmGrid ArmGrid::from_actions(std::vector<Action> actions) {
    if (actions.empty()) throw std::invalid_argument("arm grid: empty action list");
    ArmGrid grid;
    grid.arms = std::move(actions);
    for (const auto& a : grid.arms) {
        grid.tx_dbm.push_back(a.p_tx_dbm);
        grid.cs_dbm.push_back(a.p_cs_dbm);
    }
    return grid;
}

EpsilonGreedy::EpsilonGreedy(int n_arms, double epsilon0)
    : q_(static_cast<std::size_t>(n_arms), 0.0),
      n_(static_cast<std::size_t>(n_arms), 0),
      epsilon0_(epsilon0) {
    if (n_arms < 1) throw std::invalid_argument("egreedy: need at least one arm");
    if (epsilon0 < 0.0 || epsilon0 > 1.0)
        throw std::invalid_argument("egreedy: epsilon0 must be in [0,1]");
}

int EpsilonGreedy::select(std::uint64_t t, Rng& rng) const {
    if (t < 1) throw std::invalid_argument("egreedy: t must be >= 1");
    double eps = annealed_epsilon(epsilon0_, t);
    if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < eps)
        return std::uniform_int_distribution<int>(0, static_cast<int>(q_.size()) - 1)(rng);
    return argmax_lowest(q_);
}

void EpsilonGreedy::update(int arm, double reward) {
    auto a = static_cast<std::size_t>(arm);
    n_[a] += 1;
    q_[a] += (reward - q_[a]) / static_cast<double>(n_[a]);
}

void EpsilonGreedy::coop_update(int arm, double own_reward,
                                std::span<const double> other_rewards, double beta) {
    if (beta > 0.0 && other_rewards.empty())
        throw std::invalid_argument("coop egreedy: beta > 0 requires at least two agents");
    double mean_others = 0.0;
    if (!other_rewards.empty()) {
        for (double r : other_rewards) mean_others += r;
        mean_others /= static_cast<double>(other_rewards.size());
    }
    update(arm, own_reward + beta * mean_others);
}

Ucb::Ucb(int n_arms, double exploration_c)
    : q_(static_cast<std::size_t>(n_arms), 0.0),
      n_(static_cast<std::size_t>(n_arms), 0),
      c_(exploration_c) {
    if (n_arms < 1) throw std::invalid_argument("ucb: need at least one arm");
}

int Ucb::select(std::uint64_t t) const {
    if (t < 1) throw std::invalid_argument("ucb: t must be >= 1");
    for (std::size_t a = 0; a < n_.size(); ++a)
        if (n_[a] == 0) return static_cast<int>(a);
    double best = -std::numeric_limits<double>::infinity();
    int best_arm = 0;
    double log_t = std::log(static_cast<double>(t));
    for (std::size_t a = 0; a < q_.size(); ++a) {
        double score = q_[a] + c_ * std::sqrt(log_t / static_cast<double>(n_[a]));
        if (score > best) {
            best = score;
            best_arm = static_cast<int>(a);
        }
    }
    return best_arm;
}

void Ucb::update(int arm, double reward) {
    auto a = static_cast<std::size_t>(arm);
    n_[a] += 1;
    q_[a] += (reward - q_[a]) / static_cast<double>(n_[a]);
}

Thompson::Thompson(int n_arms)
    : alpha_(static_cast<std::size_t>(n_arms), 1.0),
      beta_(static_cast<std::size_t>(n_arms), 1.0) {
    if (n_arms < 1) throw std::invalid_argument("thompson: need at least one arm");
}

int Thompson::select(Rng& rng) const {
    double best = -1.0;
    int best_arm = 0;
    for (std::size_t a = 0; a < alpha_.size(); ++a) {
        double x = std::gamma_distribution<double>(alpha_[a], 1.0)(rng);
        double y = std::gamma_distribution<double>(beta_[a], 1.0)(rng);
        double theta = x / (x + y);
        if (theta > best) {
            best = theta;
            best_arm = static_cast<int>(a);
        }
    }
    return best_arm;
}

void Thompson::update(int arm, double reward, Rng& rng) {
    auto a = static_cast<std::size_t>(arm);
    double r = std::clamp(reward, 0.0, 1.0);
    bool success = std::bernoulli_distribution(r)(rng);
    if (success) alpha_[a] += 1.0;
    else beta_[a] += 1.0;
}

RegretLedger::RegretLedger(std::vector<double> means) : arm_means(std::move(means)) {
    if (arm_means.empty()) throw std::invalid_argument("regret: need arm means");
    best_mean = *std::max_element(arm_means.begin(), arm_means.end());
}

void RegretLedger::record(int arm) {
    cumulative += best_mean - arm_means[static_cast<std::size_t>(arm)];
    t += 1;
}

} // namespace srsim
