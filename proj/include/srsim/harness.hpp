#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "srsim/config.hpp"

namespace srsim {

struct KpiRecord {
    std::uint64_t t;
    int ap;
    double throughput_bps;
    int n_starving;
    double fairness_prod;
    double jain;
    double plr;
    double latency_s;
    double reward_local;
    double reward_coop;
    double p_tx_dbm;
    double p_cs_dbm;
};

struct RunSummary {
    double mean_throughput_bps = 0.0;   // network total, averaged over steps
    double cumulative_throughput_bits = 0.0;
    double mean_starving = 0.0;         // network starving-station count
    double mean_jain = 1.0;
    double mean_fairness = 1.0;
    double mean_plr = 0.0;
    double mean_latency_s = 0.0;
    double mean_reward = 0.0;
    double cumulative_reward = 0.0;
    std::uint64_t convergence_step = 0;
};

struct RunResult {
    std::vector<KpiRecord> records;       // horizon * n_aps rows
    std::vector<std::vector<int>> arm_trace; // per-AP chosen arm per step
    RunSummary summary;
};

inline constexpr const char* kKpiCsvHeader =
    "t,ap,throughput_bps,n_starving,fairness_prod,jain,plr,latency_s,"
    "reward_local,reward_coop,p_tx_dbm,p_cs_dbm";

std::string format_double(double v); // deterministic, locale-free
void write_kpi_csv(std::ostream& os, const std::vector<KpiRecord>& records);
RunSummary summarize(const std::vector<KpiRecord>& records, int n_aps, double step_s = 0.05);

// Deterministic given (config, seed). When csv is non-null, records are
// streamed to it as the run progresses.
RunResult run_experiment(const ExperimentConfig& config, std::uint64_t seed,
                         std::ostream* csv = nullptr);

struct CompareRow {
    std::string name;
    RunSummary median; // per-KPI medians over seeds
};

struct CompareResult {
    std::vector<CompareRow> rows;
    std::string to_csv() const;
    std::string to_table() const; // aligned text
};

// Per-config medians over seeds. All configs must share a scenario.
CompareResult compare(const std::vector<std::pair<std::string, ExperimentConfig>>& configs,
                      const std::vector<std::uint64_t>& seeds);

// Writes the default experiment configs (static traffic sweep, reduced-vs-full
// study, cooperation study, dynamic scenario, fixed baselines) into dir.
std::vector<std::string> emit_default_configs(const std::string& dir);

} // namespace srsim
