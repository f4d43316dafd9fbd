#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srsim/rng.hpp"

namespace srsim {

struct Position {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Position& a, const Position& b);

struct ApNode {
    int id = 0;
    Position pos;
};

struct StationNode {
    int id = 0;
    Position pos;
    double p_tx_dbm = 15.0; // stations cannot modify their TP
};

struct LoadEvent {
    double time_s = 0.0;
    std::vector<int> counts; // per-AP station counts, must sum to |stations|
};

struct LoadSchedule {
    std::vector<LoadEvent> events; // times strictly increasing
    void validate(int n_aps, int n_stations) const;
};

struct Topology {
    double arena_w = 80.0;
    double arena_h = 80.0;
    std::vector<ApNode> aps;
    std::vector<StationNode> stations;
    std::vector<int> attachment; // station index -> AP id

    int n_aps() const { return static_cast<int>(aps.size()); }
    int n_stations() const { return static_cast<int>(stations.size()); }
    std::vector<int> stations_of(int ap_id) const;   // station indices, ascending
    std::vector<int> load_counts() const;            // stations per AP
    std::string to_table() const;                    // kind,id,x,y,attached-AP
};

struct TopologyParams {
    int n_aps = 6;
    int n_stations = 15;
    double arena_w = 80.0;
    double arena_h = 80.0;
    double min_ap_separation_m = 10.0;
    double station_p_tx_dbm = 15.0;
    double relocation_radius_m = 15.0; // disc radius used by apply_load_event
};

// Nearest-AP attachment, ties broken by lowest AP id.
std::vector<int> attach_stations(const Topology& topo);

// Deterministic sampled layout: AP positions with minimum pairwise separation,
// stations uniform in the arena. Throws std::runtime_error when the separation
// constraint cannot be met after bounded retries.
Topology build_topology(std::uint64_t seed, const TopologyParams& params);

// Reassigns station->AP attachment so per-AP counts match the event. Moved
// stations are re-positioned uniformly inside a disc around their new AP.
void apply_load_event(Topology& topo, const LoadEvent& event, double relocation_radius_m, Rng& rng);

} // namespace srsim
