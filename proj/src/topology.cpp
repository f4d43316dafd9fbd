#include "srsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace srsim {

double distance(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

void LoadSchedule::validate(int n_aps, int n_stations) const {
    double prev = -1.0;
    for (const auto& ev : events) {
        if (ev.time_s <= prev)
            throw std::invalid_argument("schedule: event times must be strictly increasing");
        prev = ev.time_s;
        if (static_cast<int>(ev.counts.size()) != n_aps)
            throw std::invalid_argument("schedule: event must list one count per AP");
        int total = std::accumulate(ev.counts.begin(), ev.counts.end(), 0);
        if (total != n_stations)
            throw std::invalid_argument("schedule: event counts must sum to the station count");
    }
}

std::vector<int> Topology::stations_of(int ap_id) const {
    std::vector<int> out;
    for (std::size_t s = 0; s < attachment.size(); ++s)
        if (attachment[s] == ap_id) out.push_back(static_cast<int>(s));
    return out;
}

std::vector<int> Topology::load_counts() const {
    std::vector<int> counts(aps.size(), 0);
    for (int ap : attachment) counts[static_cast<std::size_t>(ap)]++;
    return counts;
}

std::string Topology::to_table() const {
    std::ostringstream os;
    for (const auto& ap : aps)
        os << "ap " << ap.id << ' ' << ap.pos.x << ' ' << ap.pos.y << " -\n";
    for (std::size_t s = 0; s < stations.size(); ++s)
        os << "sta " << stations[s].id << ' ' << stations[s].pos.x << ' '
           << stations[s].pos.y << ' ' << attachment[s] << '\n';
    return os.str();
}

std::vector<int> attach_stations(const Topology& topo) {
    std::vector<int> attachment(topo.stations.size(), 0);
    for (std::size_t s = 0; s < topo.stations.size(); ++s) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (const auto& ap : topo.aps) {
            double d = distance(topo.stations[s].pos, ap.pos);
            if (d < best_d) { // strict: ties keep the lowest AP id
                best_d = d;
                best = ap.id;
            }
        }
        attachment[s] = best;
    }
    return attachment;
}

Topology build_topology(std::uint64_t seed, const TopologyParams& params) {
    if (params.n_aps < 1) throw std::invalid_argument("topology: n_aps must be >= 1");
    if (params.n_stations < 0) throw std::invalid_argument("topology: n_stations must be >= 0");
    if (params.arena_w <= 0 || params.arena_h <= 0)
        throw std::invalid_argument("topology: arena dimensions must be > 0");

    Rng rng = make_rng(seed, 0);
    std::uniform_real_distribution<double> ux(0.0, params.arena_w);
    std::uniform_real_distribution<double> uy(0.0, params.arena_h);

    Topology topo;
    topo.arena_w = params.arena_w;
    topo.arena_h = params.arena_h;

    constexpr int kMaxRetries = 10000;
    for (int m = 0; m < params.n_aps; ++m) {
        Position pos;
        bool placed = false;
        for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
            pos = {ux(rng), uy(rng)};
            placed = std::all_of(topo.aps.begin(), topo.aps.end(), [&](const ApNode& ap) {
                return distance(ap.pos, pos) >= params.min_ap_separation_m;
            });
            if (placed) break;
        }
        if (!placed)
            throw std::runtime_error("topology: could not place AP " + std::to_string(m) +
                                     " with the required separation");
        topo.aps.push_back({m, pos});
    }
    for (int s = 0; s < params.n_stations; ++s)
        topo.stations.push_back({s, {ux(rng), uy(rng)}, params.station_p_tx_dbm});
    topo.attachment = attach_stations(topo);
    return topo;
}

void apply_load_event(Topology& topo, const LoadEvent& event, double relocation_radius_m, Rng& rng) {
    if (static_cast<int>(event.counts.size()) != topo.n_aps())
        throw std::invalid_argument("load event: one count per AP required");
    int total = std::accumulate(event.counts.begin(), event.counts.end(), 0);
    if (total != topo.n_stations())
        throw std::invalid_argument("load event: counts must sum to the station count");

    // Keep existing attachments while an AP still has quota; stations in
    // id order beyond the quota are reassigned to the APs with free slots.
    std::vector<int> quota = event.counts;
    std::vector<int> unassigned;
    for (std::size_t s = 0; s < topo.attachment.size(); ++s) {
        int ap = topo.attachment[s];
        if (quota[static_cast<std::size_t>(ap)] > 0) {
            quota[static_cast<std::size_t>(ap)]--;
        } else {
            unassigned.push_back(static_cast<int>(s));
        }
    }
    std::uniform_real_distribution<double> uang(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> urad(0.0, 1.0);
    for (int s : unassigned) {
        int target = -1;
        for (std::size_t m = 0; m < quota.size(); ++m) {
            if (quota[m] > 0) { target = static_cast<int>(m); quota[m]--; break; }
        }
        topo.attachment[static_cast<std::size_t>(s)] = target;
        // uniform in the disc around the new AP, clamped to the arena
        double ang = uang(rng);
        double rad = relocation_radius_m * std::sqrt(urad(rng));
        const Position& c = topo.aps[static_cast<std::size_t>(target)].pos;
        Position p{c.x + rad * std::cos(ang), c.y + rad * std::sin(ang)};
        p.x = std::clamp(p.x, 0.0, topo.arena_w);
        p.y = std::clamp(p.y, 0.0, topo.arena_h);
        topo.stations[static_cast<std::size_t>(s)].pos = p;
    }
}

} // namespace srsim
