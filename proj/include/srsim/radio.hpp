#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "srsim/topology.hpp"

namespace srsim {

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

// Path-loss propagation P_rx = P_tx / d^theta, d clamped to the reference
// distance. theta in [2,4].
double received_power_mw(double p_tx_mw, double d_m, double theta, double ref_dist_m = 1.0);

// Carrier-sense range D = (p_tx / t_cs)^(1/theta), in reference-distance units.
double cca_range_m(double p_tx_mw, double t_cs_mw, double theta);

// Law-of-cosines distance from the victim receiver to an interferer placed at
// radius (boundary + gap) from the transmitter, at angle `angle_rad` relative
// to the transmitter->receiver direction.
double interferer_distance_m(double boundary_m, double gap_m, double d_mr, double angle_rad);

struct InterferenceGeometry {
    double d_mr = 1.0;            // victim link distance
    double ap_boundary_m = 1.0;   // placement radius for AP interferers (victim's CCA range)
    double sta_boundary_m = 1.0;  // placement radius for station interferers (station CCA range)
    std::vector<double> ap_gaps, ap_angles;   // one entry per AP interferer
    std::vector<double> sta_gaps, sta_angles; // one entry per station interferer
};

// Worst-case interference: AP interferers at their given powers plus station
// interferers at the fixed station power. Throws on a co-located interferer.
double worst_case_interference_mw(const InterferenceGeometry& geom,
                                  std::span<const double> ap_powers_mw,
                                  double p_sta_mw, double theta);

// gamma = p_tx / (d^theta * I); falls back to SNR against the noise floor
// when the interference is zero.
double worst_case_sinr(double p_tx_mw, double d_mr, double i_mw, double theta,
                       double noise_floor_mw);

// Shannon capacity C = W log2(1 + gamma).
double link_capacity_bps(double gamma, double bandwidth_hz);

struct SurfaceParams {
    double theta = 3.0;
    double bandwidth_hz = 80e6;
    double sta_cca_dbm = -82.0;   // fixed station carrier-sense threshold
    double noise_floor_dbm = -94.0;
    double ref_dist_m = 1.0;
};

struct CapacitySurface {
    std::vector<double> tx_dbm;  // L_tx levels
    std::vector<double> cs_dbm;  // L_cs levels
    std::vector<double> c_total; // cs-major: index = i_cs * L_tx + i_tx
    std::size_t index(std::size_t i_cs, std::size_t i_tx) const { return i_cs * tx_dbm.size() + i_tx; }
    std::size_t argmax() const;
    std::string to_csv() const;  // header p_tx_dbm,t_cs_dbm,c_total_bps, row-major
};

// Cumulative network capacity over a (P_tx, T_cs) grid; a single candidate
// pair is applied to every AP per cell. Interferers sit exactly at the
// CCA-range boundary with angles taken from the topology.
CapacitySurface capacity_surface(const Topology& topo,
                                 const std::vector<double>& tx_levels_dbm,
                                 const std::vector<double>& cs_levels_dbm,
                                 const SurfaceParams& params = {});

struct RankedCell {
    std::size_t index;
    double p_tx_dbm;
    double p_cs_dbm;
    double c_total;
};

// Cells whose capacity is within the top_fraction quantile, sorted by
// descending capacity (ties by ascending index).
std::vector<RankedCell> reduce_action_set(const CapacitySurface& surface, double top_fraction);

} // namespace srsim
