#include "srsim/macsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srsim/radio.hpp"

namespace srsim {

PhyConfig PhyConfig::defaults() {
    PhyConfig phy;
    // 80 MHz / 2SS-class steps; thresholds are decode floors in SNR dB.
    phy.rate_table = {
        {0.0, 8.6e6},    {4.0, 17.2e6},   {8.0, 25.8e6},   {12.0, 51.6e6},
        {15.0, 103.2e6}, {18.0, 154.9e6}, {21.0, 232.3e6}, {24.0, 344.1e6},
        {27.0, 516.1e6}, {30.0, 688.1e6}, {33.0, 961.1e6}, {36.0, 1201.0e6},
    };
    return phy;
}

void PhyConfig::validate() const {
    if (idle_slot_s >= t_edca_s)
        throw std::invalid_argument("phy.idle_slot_s: must be smaller than t_edca_s");
    if (step_s <= 0.0) throw std::invalid_argument("phy.step_s: must be > 0");
    if (rate_table.empty()) throw std::invalid_argument("phy.rate_table: must not be empty");
    for (std::size_t i = 1; i < rate_table.size(); ++i) {
        if (rate_table[i].snr_db <= rate_table[i - 1].snr_db ||
            rate_table[i].rate_bps <= rate_table[i - 1].rate_bps)
            throw std::invalid_argument("phy.rate_table: thresholds and rates must be strictly increasing");
    }
    if (!(phi_min >= 0.0 && phi_min <= phi_max && phi_max <= 1.0))
        throw std::invalid_argument("phy.phi bounds: need 0 <= phi_min <= phi_max <= 1");
}

bool ActionBounds::contains(const Action& a) const {
    return a.p_tx_dbm >= tx_min_dbm && a.p_tx_dbm <= tx_max_dbm &&
           a.p_cs_dbm >= cs_min_dbm && a.p_cs_dbm <= cs_max_dbm;
}

double tx_probability(double offered_bps, double link_rate_bps, double phi_min, double phi_max) {
    if (link_rate_bps <= 0.0) return phi_max;
    double ratio = offered_bps / link_rate_bps;
    return std::clamp(ratio, phi_min, phi_max);
}

double p_idle(std::span<const double> phis) {
    double p = 1.0;
    for (double phi : phis) p *= (1.0 - phi);
    return p;
}

double data_rate(const std::vector<RateEntry>& table, double snr_db) {
    double rate = 0.0;
    for (const auto& e : table) {
        if (snr_db >= e.snr_db) rate = e.rate_bps;
        else break;
    }
    return rate;
}

double p_succ(double phi_s, std::span<const double> other_phis,
              std::span<const double> defer_duties,
              std::span<const double> collide_duties,
              double collision_cost) {
    double p = phi_s;
    for (double phi : other_phis) p *= (1.0 - phi);
    for (double duty : defer_duties) p *= (1.0 - duty);
    for (double duty : collide_duties) p *= std::max(0.0, 1.0 - collision_cost * duty);
    return p;
}

double station_throughput(double p_succ_val, double rate_bps, double p_idle_val, const PhyConfig& phy) {
    double expected_slot = phy.idle_slot_s * p_idle_val + (1.0 - p_idle_val) * phy.t_edca_s;
    if (expected_slot <= 0.0) throw std::invalid_argument("station_throughput: E(T_g) must be > 0");
    return p_succ_val * rate_bps * phy.t_txop_s / expected_slot;
}

double fairness_product(std::span<const double> throughput, std::span<const double> achievable) {
    double prod = 1.0;
    for (std::size_t s = 0; s < throughput.size(); ++s) {
        double ratio = achievable[s] > 0.0 ? throughput[s] / achievable[s] : 0.0;
        prod *= std::clamp(ratio, 0.0, 1.0);
    }
    return prod;
}

int starvation_count(std::span<const double> throughput, std::span<const double> achievable,
                     double omega, std::span<char> starving_out) {
    if (!(omega > 0.0) || omega > 1.0)
        throw std::invalid_argument("starvation: omega must be in (0,1]");
    int count = 0;
    for (std::size_t s = 0; s < throughput.size(); ++s) {
        bool starving = throughput[s] <= omega * achievable[s];
        if (!starving_out.empty()) starving_out[s] = starving ? 1 : 0;
        if (starving) ++count;
    }
    return count;
}

double reward_local(std::span<const double> throughput, std::span<const double> achievable,
                    double omega) {
    const std::size_t n = throughput.size();
    if (n == 0) return 1.0; // nothing to starve
    double prod_starving = 1.0, prod_served = 1.0;
    std::size_t n_starving = 0;
    for (std::size_t s = 0; s < n; ++s) {
        double ach = achievable[s];
        bool starving = throughput[s] <= omega * ach;
        if (starving) {
            ++n_starving;
            prod_starving *= ach > 0.0 ? throughput[s] / (omega * ach) : 0.0;
        } else {
            prod_served *= ach > 0.0 ? throughput[s] / ach : 0.0;
        }
    }
    double nd = static_cast<double>(n);
    double r = (static_cast<double>(n_starving) * (n_starving > 0 ? prod_starving : 0.0) +
                static_cast<double>(n - n_starving) * (nd + (n_starving < n ? prod_served : 0.0))) /
               (nd * (nd + 1.0));
    return std::clamp(r, 0.0, 1.0);
}

double jain_index(std::span<const double> per_ap_throughput) {
    const std::size_t m = per_ap_throughput.size();
    if (m == 0) throw std::invalid_argument("jain: need at least one AP");
    double sum = 0.0, sumsq = 0.0;
    for (double r : per_ap_throughput) {
        sum += r;
        sumsq += r * r;
    }
    if (sumsq == 0.0) return 1.0; // all-zero defined as fair
    return (sum * sum) / (static_cast<double>(m) * sumsq);
}

double reward_coop(double reward_local_val, double jain) { return reward_local_val + jain; }

double objective(double fairness_mean, double starvation_mean, double a1, double a2) {
    if (a1 < 0.0 || a2 < 0.0 || std::abs(a1 + a2 - 1.0) > 1e-12)
        throw std::invalid_argument("objective: weights must be >= 0 and sum to 1");
    return a1 * fairness_mean + a2 * (1.0 - starvation_mean);
}

Environment::Environment(Topology topo, PhyConfig phy, TrafficModel traffic,
                         double omega, double a1, double a2, ActionBounds bounds)
    : topo_(std::move(topo)), phy_(std::move(phy)), traffic_(traffic), omega_(omega),
      a1_(a1), a2_(a2), bounds_(bounds) {
    phy_.validate();
    if (!(omega_ > 0.0) || omega_ > 1.0)
        throw std::invalid_argument("omega: must be in (0,1]");
    objective(1.0, 0.0, a1_, a2_); // validates the weights
}

StepResult Environment::step(const std::vector<Action>& actions) const {
    const int n_aps = topo_.n_aps();
    const int n_stations = topo_.n_stations();
    if (static_cast<int>(actions.size()) != n_aps)
        throw std::invalid_argument("step: one action per AP required");
    for (const auto& a : actions)
        if (!bounds_.contains(a))
            throw std::invalid_argument("step: action outside the configured bounds");

    const double noise_mw = dbm_to_mw(phy_.noise_dbm);
    const double ref_loss = dbm_to_mw(phy_.ref_loss_db); // linear attenuation at 1 m
    const double floor_mw = dbm_to_mw(phy_.collision_floor_dbm);
    auto path_gain = [&](const Position& a, const Position& b) {
        double d = std::max(distance(a, b), phy_.ref_dist_m);
        return 1.0 / (ref_loss * std::pow(d, phy_.theta));
    };

    // Per-station link state (downlink SNR -> rate -> transmission probability).
    std::vector<double> rate(n_stations, 0.0), phi(n_stations, 0.0), rx_dbm(n_stations, 0.0);
    for (int s = 0; s < n_stations; ++s) {
        int m = topo_.attachment[static_cast<std::size_t>(s)];
        double p_tx_mw = dbm_to_mw(actions[static_cast<std::size_t>(m)].p_tx_dbm);
        double p_rx = p_tx_mw * path_gain(topo_.aps[static_cast<std::size_t>(m)].pos,
                                          topo_.stations[static_cast<std::size_t>(s)].pos);
        rx_dbm[static_cast<std::size_t>(s)] = mw_to_dbm(p_rx);
        double snr_db = 10.0 * std::log10(p_rx / noise_mw);
        rate[static_cast<std::size_t>(s)] = data_rate(phy_.rate_table, snr_db);
        phi[static_cast<std::size_t>(s)] =
            tx_probability(traffic_.offered_bps, rate[static_cast<std::size_t>(s)],
                           phy_.phi_min, phy_.phi_max);
    }

    // BSS occupancy, used as the duty of each foreign transmitter.
    std::vector<std::vector<int>> members(static_cast<std::size_t>(n_aps));
    for (int s = 0; s < n_stations; ++s)
        members[static_cast<std::size_t>(topo_.attachment[static_cast<std::size_t>(s)])].push_back(s);
    std::vector<double> bss_idle(static_cast<std::size_t>(n_aps), 1.0);
    for (int m = 0; m < n_aps; ++m) {
        double p = 1.0;
        for (int s : members[static_cast<std::size_t>(m)]) p *= (1.0 - phi[static_cast<std::size_t>(s)]);
        bss_idle[static_cast<std::size_t>(m)] = p;
    }

    // Foreign-transmitter factors per AP: the CCA defers to signals at or
    // above P_cs; signals between the corruption floor and P_cs collide.
    std::vector<double> defer_factor(static_cast<std::size_t>(n_aps), 1.0);
    std::vector<double> collide_factor(static_cast<std::size_t>(n_aps), 1.0);
    for (int m = 0; m < n_aps; ++m) {
        const Position& here = topo_.aps[static_cast<std::size_t>(m)].pos;
        double p_cs_mw = dbm_to_mw(actions[static_cast<std::size_t>(m)].p_cs_dbm);
        double defer = 1.0, collide = 1.0;
        auto account = [&](double p_rx_mw, double duty) {
            if (p_rx_mw >= p_cs_mw) defer *= (1.0 - duty);
            else if (p_rx_mw >= floor_mw) collide *= std::max(0.0, 1.0 - phy_.collision_cost * duty);
        };
        for (int v = 0; v < n_aps; ++v) {
            if (v == m) continue;
            double p_rx = dbm_to_mw(actions[static_cast<std::size_t>(v)].p_tx_dbm) *
                          path_gain(topo_.aps[static_cast<std::size_t>(v)].pos, here);
            account(p_rx, 1.0 - bss_idle[static_cast<std::size_t>(v)]);
        }
        for (int s = 0; s < n_stations; ++s) {
            if (topo_.attachment[static_cast<std::size_t>(s)] == m) continue;
            double p_rx = dbm_to_mw(topo_.stations[static_cast<std::size_t>(s)].p_tx_dbm) *
                          path_gain(topo_.stations[static_cast<std::size_t>(s)].pos, here);
            account(p_rx, phi[static_cast<std::size_t>(s)]);
        }
        defer_factor[static_cast<std::size_t>(m)] = defer;
        collide_factor[static_cast<std::size_t>(m)] = collide;
    }

    StepResult res;
    res.kpis.station_throughput_bps.assign(static_cast<std::size_t>(n_stations), 0.0);
    res.kpis.station_achievable_bps.assign(static_cast<std::size_t>(n_stations), 0.0);
    res.kpis.station_starving.assign(static_cast<std::size_t>(n_stations), 0);
    res.kpis.ap.resize(static_cast<std::size_t>(n_aps));
    res.contexts.resize(static_cast<std::size_t>(n_aps));
    res.reward_local.resize(static_cast<std::size_t>(n_aps));
    res.reward_coop.resize(static_cast<std::size_t>(n_aps));

    std::vector<double> per_ap_total(static_cast<std::size_t>(n_aps), 0.0);
    double fairness_sum = 0.0, starving_frac_sum = 0.0;

    for (int m = 0; m < n_aps; ++m) {
        const auto& bss = members[static_cast<std::size_t>(m)];
        const std::size_t nm = bss.size();
        std::vector<double> thr(nm, 0.0), ach(nm, 0.0), lat(nm, 0.0);
        double pid = bss_idle[static_cast<std::size_t>(m)];
        double expected_slot = phy_.idle_slot_s * pid + (1.0 - pid) * phy_.t_edca_s;
        double gate = defer_factor[static_cast<std::size_t>(m)] *
                      collide_factor[static_cast<std::size_t>(m)];
        for (std::size_t j = 0; j < nm; ++j) {
            int s = bss[j];
            double phi_s = phi[static_cast<std::size_t>(s)];
            double others = 1.0;
            for (std::size_t k = 0; k < nm; ++k)
                if (k != j) others *= (1.0 - phi[static_cast<std::size_t>(bss[k])]);
            double succ = phi_s * gate * others;
            double raw = station_throughput(succ, rate[static_cast<std::size_t>(s)], pid, phy_);
            thr[j] = std::min(raw, traffic_.offered_bps);
            // achievable: sole station on the link, gates open
            if (rate[static_cast<std::size_t>(s)] > 0.0) {
                double sole_idle = 1.0 - phi_s;
                double sole = station_throughput(phi_s, rate[static_cast<std::size_t>(s)], sole_idle, phy_);
                ach[j] = std::min(sole, traffic_.offered_bps);
            }
            lat[j] = expected_slot / std::max(succ, 1e-6);
            res.kpis.station_throughput_bps[static_cast<std::size_t>(s)] = thr[j];
            res.kpis.station_achievable_bps[static_cast<std::size_t>(s)] = ach[j];
        }

        ApKpis& kp = res.kpis.ap[static_cast<std::size_t>(m)];
        std::vector<char> starving(nm, 0);
        kp.n_starving = starvation_count(thr, ach, omega_, starving);
        for (std::size_t j = 0; j < nm; ++j)
            res.kpis.station_starving[static_cast<std::size_t>(bss[j])] = starving[j];
        kp.fairness_prod = fairness_product(thr, ach);
        kp.reward_local = reward_local(thr, ach, omega_);
        double delivered = 0.0;
        for (double r : thr) delivered += r;
        kp.throughput_bps = delivered;
        per_ap_total[static_cast<std::size_t>(m)] = delivered;
        double offered_total = traffic_.offered_bps * static_cast<double>(nm);
        kp.plr = offered_total > 0.0 ? std::clamp(1.0 - delivered / offered_total, 0.0, 1.0) : 0.0;
        kp.latency_s = nm > 0 ? std::accumulate(lat.begin(), lat.end(), 0.0) / static_cast<double>(nm) : 0.0;

        // context features
        Context& ctx = res.contexts[static_cast<std::size_t>(m)];
        ctx.starving_fraction = nm > 0 ? static_cast<double>(kp.n_starving) / static_cast<double>(nm) : 0.0;
        double mean_rssi = 0.0;
        for (int s : bss) mean_rssi += rx_dbm[static_cast<std::size_t>(s)];
        mean_rssi = nm > 0 ? mean_rssi / static_cast<double>(nm) : phy_.noise_dbm;
        if (mean_rssi >= -60.0) ctx.rssi_bucket = 0.0;
        else if (mean_rssi >= -70.0) ctx.rssi_bucket = 0.25;
        else if (mean_rssi >= -80.0) ctx.rssi_bucket = 0.5;
        else if (mean_rssi >= -90.0) ctx.rssi_bucket = 0.75;
        else ctx.rssi_bucket = 1.0;
        ctx.noise_scaled = phy_.noise_dbm / 100.0;

        fairness_sum += kp.fairness_prod;
        starving_frac_sum += ctx.starving_fraction;
    }

    res.kpis.jain = jain_index(per_ap_total);
    res.kpis.total_throughput_bps = std::accumulate(per_ap_total.begin(), per_ap_total.end(), 0.0);
    res.kpis.fairness_mean = fairness_sum / static_cast<double>(n_aps);
    res.kpis.starvation_mean = starving_frac_sum / static_cast<double>(n_aps);
    res.kpis.objective = objective(res.kpis.fairness_mean, res.kpis.starvation_mean, a1_, a2_);

    for (int m = 0; m < n_aps; ++m) {
        res.reward_local[static_cast<std::size_t>(m)] = res.kpis.ap[static_cast<std::size_t>(m)].reward_local;
        res.reward_coop[static_cast<std::size_t>(m)] =
            reward_coop(res.reward_local[static_cast<std::size_t>(m)], res.kpis.jain);
        res.kpis.ap[static_cast<std::size_t>(m)].reward_coop = res.reward_coop[static_cast<std::size_t>(m)];
    }
    return res;
}

void Environment::apply_load_event(const LoadEvent& event, double relocation_radius_m, Rng& rng) {
    srsim::apply_load_event(topo_, event, relocation_radius_m, rng);
}

} // namespace srsim
