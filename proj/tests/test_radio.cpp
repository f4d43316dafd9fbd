#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "srsim/radio.hpp"
#include "srsim/rng.hpp"

using namespace srsim;
using doctest::Approx;

TEST_CASE("dBm/mW round trip") {
    Rng rng = make_rng(11, 0);
    std::uniform_real_distribution<double> u(-100.0, 30.0);
    for (int i = 0; i < 1000; ++i) {
        double dbm = u(rng);
        CHECK(mw_to_dbm(dbm_to_mw(dbm)) == Approx(dbm).epsilon(1e-9));
    }
    CHECK_THROWS_AS(mw_to_dbm(0.0), std::invalid_argument);
}

TEST_CASE("path loss evaluates and decreases with distance") {
    CHECK(received_power_mw(100.0, 1.0, 3.0) == Approx(100.0));
    CHECK(received_power_mw(100.0, 10.0, 2.0) == Approx(1.0));
    CHECK(received_power_mw(16.0, 2.0, 4.0) == Approx(1.0));
    CHECK_THROWS_AS(received_power_mw(1.0, 0.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(received_power_mw(1.0, -1.0, 3.0), std::invalid_argument);
    // below the reference distance the value is clamped
    CHECK(received_power_mw(100.0, 0.5, 3.0) == Approx(100.0));

    Rng rng = make_rng(11, 1);
    std::uniform_real_distribution<double> ud(1.0, 100.0);
    for (int i = 0; i < 200; ++i) {
        double d1 = ud(rng), d2 = ud(rng);
        if (d1 > d2) std::swap(d1, d2);
        CHECK(received_power_mw(50.0, d1, 3.0) >= received_power_mw(50.0, d2, 3.0));
    }
}

TEST_CASE("carrier-sense range") {
    CHECK(cca_range_m(5.0, 5.0, 3.0) == Approx(1.0));
    CHECK(cca_range_m(1e6, 1.0, 3.0) == Approx(100.0));
    CHECK(cca_range_m(1e4, 1.0, 2.0) == Approx(100.0));
    CHECK_THROWS_AS(cca_range_m(0.0, 1.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(cca_range_m(1.0, 0.0, 3.0), std::invalid_argument);
    // monotone: up in p_tx, down in t_cs
    CHECK(cca_range_m(2.0, 1.0, 3.0) > cca_range_m(1.0, 1.0, 3.0));
    CHECK(cca_range_m(1.0, 2.0, 3.0) < cca_range_m(1.0, 1.0, 3.0));
}

TEST_CASE("interferer distance follows the law of cosines") {
    CHECK(interferer_distance_m(10.0, 0.0, 4.0, 0.0) == Approx(6.0));
    CHECK(interferer_distance_m(10.0, 0.0, 4.0, std::numbers::pi) == Approx(14.0));
    CHECK(interferer_distance_m(2.0, 1.0, 4.0, std::numbers::pi / 2.0) == Approx(5.0));
    CHECK_THROWS_AS(interferer_distance_m(-1.0, 0.0, 4.0, 0.0), std::invalid_argument);

    Rng rng = make_rng(11, 2);
    std::uniform_real_distribution<double> ul(0.0, 50.0), ua(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < 500; ++i) {
        double a = ul(rng), b = ul(rng), ang = ua(rng);
        double x = interferer_distance_m(a, 0.0, b, ang);
        CHECK(x >= std::abs(a - b) - 1e-9);
        CHECK(x <= a + b + 1e-9);
    }
}

TEST_CASE("worst-case interference sums AP and station terms") {
    InterferenceGeometry none;
    CHECK(worst_case_interference_mw(none, {}, 10.0, 2.0) == Approx(0.0));

    InterferenceGeometry one_ap;
    one_ap.d_mr = 0.0; // X reduces to the boundary radius
    one_ap.ap_boundary_m = 10.0;
    one_ap.ap_gaps = {0.0};
    one_ap.ap_angles = {0.0};
    std::vector<double> p{100.0};
    CHECK(worst_case_interference_mw(one_ap, p, 10.0, 2.0) == Approx(1.0));

    InterferenceGeometry both = one_ap;
    both.sta_boundary_m = 10.0;
    both.sta_gaps = {0.0};
    both.sta_angles = {0.0};
    CHECK(worst_case_interference_mw(both, p, 10.0, 2.0) == Approx(1.1));

    // monotone nondecreasing in interferer power
    std::vector<double> stronger{200.0};
    CHECK(worst_case_interference_mw(one_ap, stronger, 10.0, 2.0) >
          worst_case_interference_mw(one_ap, p, 10.0, 2.0));

    InterferenceGeometry colocated = one_ap;
    colocated.ap_boundary_m = 0.0;
    CHECK_THROWS_AS(worst_case_interference_mw(colocated, p, 10.0, 2.0), std::invalid_argument);
}

TEST_CASE("worst-case SINR") {
    CHECK(worst_case_sinr(100.0, 1.0, 1.0, 3.0, 1e-12) == Approx(100.0));
    double g1 = worst_case_sinr(100.0, 2.0, 1.0, 3.0, 1e-12);
    double g2 = worst_case_sinr(100.0, 2.0, 2.0, 3.0, 1e-12);
    CHECK(g2 == Approx(g1 / 2.0));
    // ratio invariance under uniform power scaling
    double k = 7.5;
    CHECK(worst_case_sinr(k * 100.0, 2.0, k * 1.0, 3.0, 1e-12) == Approx(g1));
    // zero interference falls back to the noise floor
    CHECK(worst_case_sinr(100.0, 1.0, 0.0, 3.0, 0.01) == Approx(10000.0));
    CHECK_THROWS_AS(worst_case_sinr(1.0, 0.0, 1.0, 3.0, 1e-12), std::invalid_argument);
}

TEST_CASE("Shannon capacity") {
    CHECK(link_capacity_bps(0.0, 80e6) == Approx(0.0));
    CHECK(link_capacity_bps(1.0, 80e6) == Approx(80e6));
    CHECK(link_capacity_bps(3.0, 1.0) == Approx(2.0));
    CHECK(link_capacity_bps(2.0, 80e6) > link_capacity_bps(1.0, 80e6));
    CHECK_THROWS_AS(link_capacity_bps(-0.1, 80e6), std::invalid_argument);
    CHECK_THROWS_AS(link_capacity_bps(1.0, 0.0), std::invalid_argument);
}

namespace {

std::vector<double> linear_levels(double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i)
        v.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    return v;
}

} // namespace

TEST_CASE("capacity surface peaks at high TP / low CS threshold") {
    TopologyParams params;
    Topology topo = build_topology(42, params);
    auto tx = linear_levels(1.0, 21.0, 21);
    auto cs = linear_levels(-82.0, -62.0, 21);
    CapacitySurface surf = capacity_surface(topo, tx, cs);
    REQUIRE(surf.c_total.size() == 441);
    for (double c : surf.c_total) {
        CHECK(std::isfinite(c));
        CHECK(c >= 0.0);
    }
    std::size_t best = surf.argmax();
    double best_tx = surf.tx_dbm[best % surf.tx_dbm.size()];
    double best_cs = surf.cs_dbm[best / surf.tx_dbm.size()];
    CHECK(best_tx >= 16.0);
    CHECK(best_cs <= -72.0);
}

TEST_CASE("single AP/station surface is constant along the CS axis") {
    Topology topo;
    topo.aps = {{0, {0.0, 0.0}}};
    topo.stations = {{0, {5.0, 0.0}, 15.0}};
    topo.attachment = {0};
    auto tx = linear_levels(1.0, 21.0, 5);
    auto cs = linear_levels(-82.0, -62.0, 5);
    CapacitySurface surf = capacity_surface(topo, tx, cs);
    for (std::size_t i_tx = 0; i_tx < tx.size(); ++i_tx)
        for (std::size_t i_cs = 1; i_cs < cs.size(); ++i_cs)
            CHECK(surf.c_total[surf.index(i_cs, i_tx)] ==
                  Approx(surf.c_total[surf.index(0, i_tx)]).epsilon(1e-12));
}

TEST_CASE("doubling AP powers keeps the CS argmax index") {
    TopologyParams params;
    Topology topo = build_topology(42, params);
    auto cs = linear_levels(-82.0, -62.0, 21);
    auto tx = linear_levels(1.0, 21.0, 21);
    auto tx_doubled = tx;
    for (double& v : tx_doubled) v += 10.0 * std::log10(2.0);
    CapacitySurface a = capacity_surface(topo, tx, cs);
    CapacitySurface b = capacity_surface(topo, tx_doubled, cs);
    CHECK(a.argmax() / a.tx_dbm.size() == b.argmax() / b.tx_dbm.size());
}

TEST_CASE("uniform scaling of every transmit power leaves the SINR unchanged") {
    Rng rng = make_rng(11, 3);
    std::uniform_real_distribution<double> up(1.0, 200.0), ud(1.0, 40.0);
    for (int i = 0; i < 200; ++i) {
        double p = up(rng), d = ud(rng), imw = up(rng) * 1e-6, k = up(rng);
        CHECK(worst_case_sinr(k * p, d, k * imw, 3.0, 1e-12) ==
              Approx(worst_case_sinr(p, d, imw, 3.0, 1e-12)));
    }
}

TEST_CASE("reduced action set selects the top of the surface") {
    TopologyParams params;
    Topology topo = build_topology(42, params);
    auto tx = linear_levels(1.0, 21.0, 21);
    auto cs = linear_levels(-82.0, -62.0, 21);
    CapacitySurface surf = capacity_surface(topo, tx, cs);

    auto all = reduce_action_set(surf, 1.0);
    CHECK(all.size() == surf.c_total.size());

    auto top = reduce_action_set(surf, 0.02); // ceil(0.02*441) = 9 cells
    REQUIRE(!top.empty());
    CHECK(top.size() == 9);
    bool has_corner = false;
    for (const auto& cell : top)
        if (cell.p_tx_dbm == Approx(21.0) && cell.p_cs_dbm == Approx(-82.0)) has_corner = true;
    CHECK(has_corner);
    for (std::size_t i = 1; i < top.size(); ++i) CHECK(top[i - 1].c_total >= top[i].c_total);

    CHECK_THROWS_AS(reduce_action_set(surf, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(reduce_action_set(CapacitySurface{}, 0.5), std::invalid_argument);
}

TEST_CASE("surface with a single strict maximum reduces to that cell") {
    CapacitySurface surf;
    surf.tx_dbm = {1.0, 2.0};
    surf.cs_dbm = {-82.0, -81.0};
    surf.c_total = {1.0, 5.0, 2.0, 3.0};
    auto top = reduce_action_set(surf, 1e-9);
    REQUIRE(top.size() == 1);
    CHECK(top[0].index == 1);
    CHECK(top[0].p_tx_dbm == Approx(2.0));
    CHECK(top[0].p_cs_dbm == Approx(-82.0));
}

TEST_CASE("surface CSV schema") {
    CapacitySurface surf;
    surf.tx_dbm = {1.0};
    surf.cs_dbm = {-82.0};
    surf.c_total = {5.0};
    std::string csv = surf.to_csv();
    CHECK(csv.rfind("p_tx_dbm,t_cs_dbm,c_total_bps\n", 0) == 0);
    CHECK(csv.find("1,-82,5") != std::string::npos);
}
