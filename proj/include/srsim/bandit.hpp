#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "srsim/macsim.hpp"
#include "srsim/rng.hpp"

namespace srsim {

// Cartesian (P_cs, P_tx) arm grid, cs-major: arm k = i_cs * L_tx + i_tx.
struct ArmGrid {
    std::vector<double> cs_dbm;
    std::vector<double> tx_dbm;
    std::vector<Action> arms;

    int size() const { return static_cast<int>(arms.size()); }
    const Action& action(int arm) const { return arms[static_cast<std::size_t>(arm)]; }

    static ArmGrid build(double cs_min, double cs_max, int l_cs,
                         double tx_min, double tx_max, int l_tx);
    // Fixed P_cs = -82 dBm, P_tx in {15..21} dBm (7 arms).
    static ArmGrid reduced();
    static ArmGrid from_actions(std::vector<Action> actions);
};

inline double annealed_epsilon(double epsilon0, std::uint64_t t) {
    return epsilon0 / std::sqrt(static_cast<double>(t));
}

class EpsilonGreedy {
public:
    EpsilonGreedy(int n_arms, double epsilon0 = 1.0);

    int select(std::uint64_t t, Rng& rng) const; // epsilon_t = epsilon0 / sqrt(t)
    void update(int arm, double reward);
    // Cooperative update: reward blended with the mean of the other
    // agents' rewards. beta = 0 reduces to update().
    void coop_update(int arm, double own_reward, std::span<const double> other_rewards, double beta);

    const std::vector<double>& q() const { return q_; }
    const std::vector<std::uint64_t>& n() const { return n_; }
    double epsilon0() const { return epsilon0_; }

private:
    std::vector<double> q_;
    std::vector<std::uint64_t> n_;
    double epsilon0_;
};

class Ucb {
public:
    Ucb(int n_arms, double exploration_c = 1.0);

    int select(std::uint64_t t) const; // unpulled arms first, lowest index
    void update(int arm, double reward);

    const std::vector<double>& q() const { return q_; }
    const std::vector<std::uint64_t>& n() const { return n_; }

private:
    std::vector<double> q_;
    std::vector<std::uint64_t> n_;
    double c_;
};

// Beta-Bernoulli Thompson sampling. Rewards outside [0,1] are clipped after
// the caller's normalization (cooperative rewards are pre-scaled by 1/2).
class Thompson {
public:
    explicit Thompson(int n_arms);

    int select(Rng& rng) const;
    void update(int arm, double reward, Rng& rng);

    const std::vector<double>& alpha() const { return alpha_; }
    const std::vector<double>& beta() const { return beta_; }

private:
    std::vector<double> alpha_;
    std::vector<double> beta_;
};

// Cumulative regret against a known best-arm mean (synthetic tasks only).
struct RegretLedger {
    std::vector<double> arm_means;
    double best_mean = 0.0;
    double cumulative = 0.0;
    std::uint64_t t = 0;

    explicit RegretLedger(std::vector<double> means);
    void record(int arm);
};

} // namespace srsim
