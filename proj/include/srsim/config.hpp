#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "srsim/bandit.hpp"
#include "srsim/macsim.hpp"
#include "srsim/sau.hpp"
#include "srsim/topology.hpp"
#include "srsim/transfer.hpp"

namespace srsim {

// Flat key-value config text: `section.key = value`, `#` comments.
class KeyValueFile {
public:
    static KeyValueFile parse(const std::string& text);
    static KeyValueFile load(const std::string& path);

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const; // throws on missing key
    std::string get_or(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key, double def) const;
    int get_int(const std::string& key, int def) const;
    std::vector<double> get_doubles(const std::string& key) const;
    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

enum class Algo { egreedy, ucb, thompson, coop_egreedy, sau, sau_coop, fixed };
Algo algo_from_string(const std::string& s);
std::string to_string(Algo a);

enum class GridMode { full, reduced, explicit_list };

struct TransferSpec {
    bool enabled = false;
    TransferStrategy strategy;
    std::vector<double> event_times_s; // aligned with the load schedule
};

struct ExperimentConfig {
    // scenario
    TopologyParams topology;
    double offered_gbps = 0.056;
    LoadSchedule schedule; // empty for static scenarios
    // learning
    Algo algo = Algo::egreedy;
    double epsilon0 = 1.0;
    double ucb_c = 1.0;
    double beta = 0.5;
    TrainerConfig trainer;
    Action fixed_action{16.0, -82.0}; // used when algo == fixed
    // action grid
    GridMode grid_mode = GridMode::reduced;
    int l_cs = 21, l_tx = 21;
    std::vector<Action> explicit_actions;
    // environment
    PhyConfig phy = PhyConfig::defaults();
    double omega = 0.1;
    double a1 = 0.5, a2 = 0.5;
    ActionBounds bounds;
    // run
    std::uint64_t horizon = 5000;
    TransferSpec transfer;

    ArmGrid make_grid() const;
    void validate() const; // throws std::invalid_argument with the field path

    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_keyvalues(const KeyValueFile& kv);
    std::string to_text() const;
    // scenario-defining keys only, used by compare() to check config pairing
    std::string scenario_fingerprint() const;
};

} // namespace srsim
