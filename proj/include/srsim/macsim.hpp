#pragma once

#include <span>
#include <vector>

#include "srsim/topology.hpp"

namespace srsim {

struct RateEntry {
    double snr_db;   // inclusive lower threshold
    double rate_bps;
};

struct PhyConfig {
    double idle_slot_s = 9e-6;   // delta
    double t_edca_s = 100e-6;
    double t_txop_s = 100e-6;
    double noise_dbm = -94.0;
    double theta = 3.0;
    double ref_loss_db = 46.7;   // path loss at the 1 m reference, 5 GHz
    double ref_dist_m = 1.0;
    double bandwidth_hz = 80e6;
    double step_s = 0.05;
    double phi_min = 0.01;
    double phi_max = 0.95;
    double collision_floor_dbm = -82.0; // signals above this can corrupt a frame
    double collision_cost = 2.0;        // collision vs deferral airtime penalty
    std::vector<RateEntry> rate_table;  // thresholds and rates strictly increasing

    static PhyConfig defaults();
    void validate() const;
};

struct TrafficModel {
    double offered_bps = 0.056e9; // per-station UDP downlink load
};

struct Action {
    double p_tx_dbm = 16.0;
    double p_cs_dbm = -82.0;
};

struct ActionBounds {
    double tx_min_dbm = 1.0;
    double tx_max_dbm = 21.0;
    double cs_min_dbm = -82.0;
    double cs_max_dbm = -62.0;
    bool contains(const Action& a) const;
};

struct Context {
    double starving_fraction = 0.0; // psi in [0,1]
    double rssi_bucket = 0.5;       // {0, 0.25, 0.5, 0.75, 1}
    double noise_scaled = 0.0;      // noise dBm / 100
};

struct ApKpis {
    double throughput_bps = 0.0; // sum over attached stations
    int n_starving = 0;
    double fairness_prod = 1.0;
    double plr = 0.0;
    double latency_s = 0.0;
    double reward_local = 1.0;
    double reward_coop = 2.0;
};

struct StepKpis {
    std::vector<double> station_throughput_bps; // indexed by station
    std::vector<double> station_achievable_bps;
    std::vector<char> station_starving;
    std::vector<ApKpis> ap;
    double jain = 1.0;
    double total_throughput_bps = 0.0;
    double fairness_mean = 1.0;      // network product fairness
    double starvation_mean = 0.0;    // mean starving fraction over APs
    double objective = 1.0;
};

struct StepResult {
    StepKpis kpis;
    std::vector<Context> contexts;     // one per AP
    std::vector<double> reward_local;  // one per AP
    std::vector<double> reward_coop;
};

// --- per-operation building blocks ---------------------------------------

double tx_probability(double offered_bps, double link_rate_bps, double phi_min, double phi_max);
double p_idle(std::span<const double> phis);
double data_rate(const std::vector<RateEntry>& table, double snr_db);

// Success probability of one station's transmission. Foreign transmitters the
// CCA defers to contribute (1 - duty); transmitters it ignores but that are
// strong enough to corrupt the frame contribute (1 - min(1, cost * duty)).
double p_succ(double phi_s, std::span<const double> other_phis,
              std::span<const double> defer_duties,
              std::span<const double> collide_duties,
              double collision_cost);

// R = P_SUCC * D * T_TXOP / (delta * P_IDLE + (1 - P_IDLE) * T_EDCA).
double station_throughput(double p_succ_val, double rate_bps, double p_idle_val, const PhyConfig& phy);

double fairness_product(std::span<const double> throughput,
                        std::span<const double> achievable);
int starvation_count(std::span<const double> throughput,
                     std::span<const double> achievable, double omega,
                     std::span<char> starving_out = {});
double reward_local(std::span<const double> throughput,
                    std::span<const double> achievable, double omega);
double jain_index(std::span<const double> per_ap_throughput);
double reward_coop(double reward_local_val, double jain);
double objective(double fairness_mean, double starvation_mean, double a1, double a2);

// --- the per-step analytical environment ----------------------------------

class Environment {
public:
    Environment(Topology topo, PhyConfig phy, TrafficModel traffic,
                double omega = 0.1, double a1 = 0.5, double a2 = 0.5,
                ActionBounds bounds = {});

    // Deterministic given current topology and actions. Throws on an
    // out-of-range action without touching any state.
    StepResult step(const std::vector<Action>& actions) const;

    void apply_load_event(const LoadEvent& event, double relocation_radius_m, Rng& rng);

    const Topology& topology() const { return topo_; }
    const PhyConfig& phy() const { return phy_; }
    const TrafficModel& traffic() const { return traffic_; }
    const ActionBounds& bounds() const { return bounds_; }
    double omega() const { return omega_; }

private:
    Topology topo_;
    PhyConfig phy_;
    TrafficModel traffic_;
    double omega_;
    double a1_, a2_;
    ActionBounds bounds_;
};

} // namespace srsim
