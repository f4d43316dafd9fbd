#include "srsim/radio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace srsim {

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double mw_to_dbm(double mw) {
    if (mw <= 0.0) throw std::invalid_argument("mw_to_dbm: power must be > 0");
    return 10.0 * std::log10(mw);
}

double received_power_mw(double p_tx_mw, double d_m, double theta, double ref_dist_m) {
    if (d_m <= 0.0) throw std::invalid_argument("received_power: distance must be > 0");
    double d = std::max(d_m, ref_dist_m);
    return p_tx_mw / std::pow(d, theta);
}

double cca_range_m(double p_tx_mw, double t_cs_mw, double theta) {
    if (p_tx_mw <= 0.0 || t_cs_mw <= 0.0)
        throw std::invalid_argument("cca_range: powers must be > 0");
    return std::pow(p_tx_mw / t_cs_mw, 1.0 / theta);
}

double interferer_distance_m(double boundary_m, double gap_m, double d_mr, double angle_rad) {
    if (boundary_m < 0.0 || gap_m < 0.0 || d_mr < 0.0)
        throw std::invalid_argument("interferer_distance: lengths must be >= 0");
    double a = boundary_m + gap_m;
    double sq = a * a + d_mr * d_mr - 2.0 * a * d_mr * std::cos(angle_rad);
    if (sq < 0.0) sq = 0.0; // cos rounding only; the form is a squared distance
    return std::sqrt(sq);
}

double worst_case_interference_mw(const InterferenceGeometry& geom,
                                  std::span<const double> ap_powers_mw,
                                  double p_sta_mw, double theta) {
    if (ap_powers_mw.size() != geom.ap_gaps.size() || geom.ap_gaps.size() != geom.ap_angles.size())
        throw std::invalid_argument("interference: AP geometry/power size mismatch");
    if (geom.sta_gaps.size() != geom.sta_angles.size())
        throw std::invalid_argument("interference: station geometry size mismatch");

    double total = 0.0;
    for (std::size_t v = 0; v < ap_powers_mw.size(); ++v) {
        double x = interferer_distance_m(geom.ap_boundary_m, geom.ap_gaps[v], geom.d_mr, geom.ap_angles[v]);
        if (x == 0.0) throw std::invalid_argument("interference: co-located AP interferer");
        total += ap_powers_mw[v] / std::pow(x, theta);
    }
    double sta_sum = 0.0;
    for (std::size_t w = 0; w < geom.sta_gaps.size(); ++w) {
        double x = interferer_distance_m(geom.sta_boundary_m, geom.sta_gaps[w], geom.d_mr, geom.sta_angles[w]);
        if (x == 0.0) throw std::invalid_argument("interference: co-located station interferer");
        sta_sum += 1.0 / std::pow(x, theta);
    }
    return total + p_sta_mw * sta_sum;
}

double worst_case_sinr(double p_tx_mw, double d_mr, double i_mw, double theta,
                       double noise_floor_mw) {
    if (d_mr <= 0.0) throw std::invalid_argument("sinr: distance must be > 0");
    double denom_pow = std::pow(d_mr, theta);
    if (i_mw > 0.0) return p_tx_mw / (denom_pow * i_mw);
    return (p_tx_mw / denom_pow) / noise_floor_mw;
}

double link_capacity_bps(double gamma, double bandwidth_hz) {
    if (gamma < 0.0) throw std::invalid_argument("capacity: sinr must be >= 0");
    if (bandwidth_hz <= 0.0) throw std::invalid_argument("capacity: bandwidth must be > 0");
    return bandwidth_hz * std::log2(1.0 + gamma);
}

std::size_t CapacitySurface::argmax() const {
    return static_cast<std::size_t>(
        std::distance(c_total.begin(), std::max_element(c_total.begin(), c_total.end())));
}

std::string CapacitySurface::to_csv() const {
    std::string out = "p_tx_dbm,t_cs_dbm,c_total_bps\n";
    char buf[96];
    for (std::size_t i_cs = 0; i_cs < cs_dbm.size(); ++i_cs) {
        for (std::size_t i_tx = 0; i_tx < tx_dbm.size(); ++i_tx) {
            std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g\n", tx_dbm[i_tx], cs_dbm[i_cs],
                          c_total[index(i_cs, i_tx)]);
            out += buf;
        }
    }
    return out;
}

namespace {

double angle_at(const Position& origin, const Position& to_receiver, const Position& to_interferer) {
    double ax = to_receiver.x - origin.x, ay = to_receiver.y - origin.y;
    double bx = to_interferer.x - origin.x, by = to_interferer.y - origin.y;
    double na = std::hypot(ax, ay), nb = std::hypot(bx, by);
    if (na == 0.0 || nb == 0.0) return 0.0;
    double c = std::clamp((ax * bx + ay * by) / (na * nb), -1.0, 1.0);
    return std::acos(c);
}

} // namespace

CapacitySurface capacity_surface(const Topology& topo,
                                 const std::vector<double>& tx_levels_dbm,
                                 const std::vector<double>& cs_levels_dbm,
                                 const SurfaceParams& params) {
    if (tx_levels_dbm.empty() || cs_levels_dbm.empty())
        throw std::invalid_argument("surface: empty grid");
    if (topo.n_aps() < 1) throw std::invalid_argument("surface: topology has no APs");

    CapacitySurface surf;
    surf.tx_dbm = tx_levels_dbm;
    surf.cs_dbm = cs_levels_dbm;
    surf.c_total.assign(tx_levels_dbm.size() * cs_levels_dbm.size(), 0.0);

    const double p_sta_mw =
        topo.stations.empty() ? dbm_to_mw(15.0) : dbm_to_mw(topo.stations.front().p_tx_dbm);
    const double sta_boundary = cca_range_m(p_sta_mw, dbm_to_mw(params.sta_cca_dbm), params.theta);
    const double noise_mw = dbm_to_mw(params.noise_floor_dbm);

    for (std::size_t i_cs = 0; i_cs < cs_levels_dbm.size(); ++i_cs) {
        const double t_cs_mw = dbm_to_mw(cs_levels_dbm[i_cs]);
        for (std::size_t i_tx = 0; i_tx < tx_levels_dbm.size(); ++i_tx) {
            const double p_tx_mw = dbm_to_mw(tx_levels_dbm[i_tx]);
            const double ap_boundary = cca_range_m(p_tx_mw, t_cs_mw, params.theta);
            double c_total = 0.0;
            for (const auto& ap : topo.aps) {
                for (std::size_t s = 0; s < topo.stations.size(); ++s) {
                    if (topo.attachment[s] != ap.id) continue;
                    const Position& rx = topo.stations[s].pos;
                    double d_mr = std::max(distance(ap.pos, rx), params.ref_dist_m);
                    InterferenceGeometry geom;
                    geom.d_mr = d_mr;
                    geom.ap_boundary_m = ap_boundary;
                    geom.sta_boundary_m = sta_boundary;
                    std::vector<double> ap_powers;
                    for (const auto& other : topo.aps) {
                        if (other.id == ap.id) continue;
                        geom.ap_gaps.push_back(0.0);
                        geom.ap_angles.push_back(angle_at(ap.pos, rx, other.pos));
                        ap_powers.push_back(p_tx_mw);
                    }
                    for (const auto& sta : topo.stations) {
                        geom.sta_gaps.push_back(0.0);
                        geom.sta_angles.push_back(angle_at(ap.pos, rx, sta.pos));
                    }
                    double i_mw = worst_case_interference_mw(geom, ap_powers, p_sta_mw, params.theta);
                    double gamma = worst_case_sinr(p_tx_mw, d_mr, i_mw, params.theta, noise_mw);
                    c_total += link_capacity_bps(gamma, params.bandwidth_hz);
                }
            }
            surf.c_total[surf.index(i_cs, i_tx)] = c_total;
        }
    }
    return surf;
}

std::vector<RankedCell> reduce_action_set(const CapacitySurface& surface, double top_fraction) {
    if (surface.c_total.empty()) throw std::invalid_argument("reduce_action_set: empty surface");
    if (!(top_fraction > 0.0) || top_fraction > 1.0)
        throw std::invalid_argument("reduce_action_set: top_fraction must be in (0,1]");

    std::vector<std::size_t> order(surface.c_total.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return surface.c_total[a] > surface.c_total[b];
    });
    std::size_t keep = static_cast<std::size_t>(
        std::ceil(top_fraction * static_cast<double>(order.size())));
    keep = std::clamp<std::size_t>(keep, 1, order.size());

    std::vector<RankedCell> out;
    out.reserve(keep);
    const std::size_t l_tx = surface.tx_dbm.size();
    for (std::size_t i = 0; i < keep; ++i) {
        std::size_t idx = order[i];
        out.push_back({idx, surface.tx_dbm[idx % l_tx], surface.cs_dbm[idx / l_tx],
                       surface.c_total[idx]});
    }
    return out;
}

} // namespace srsim
