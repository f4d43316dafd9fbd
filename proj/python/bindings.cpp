// Python bindings for the spatial-reuse simulator and bandit library.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "srsim/bandit.hpp"
#include "srsim/harness.hpp"
#include "srsim/radio.hpp"
#include "srsim/sau.hpp"

namespace py = pybind11;
using namespace srsim;

namespace {

// Stateless bandits take an external RNG in C++; for Python each wrapper owns
// a seeded generator so results stay reproducible per object.
struct PyEpsilonGreedy {
    EpsilonGreedy agent;
    Rng rng;
    std::uint64_t t = 0;
    PyEpsilonGreedy(int n_arms, double epsilon0, std::uint64_t seed)
        : agent(n_arms, epsilon0), rng(make_rng(seed, 0)) {}
    int select() { return agent.select(++t, rng); }
    void update(int arm, double reward) { agent.update(arm, reward); }
};

struct PyUcb {
    Ucb agent;
    std::uint64_t t = 0;
    PyUcb(int n_arms, double c) : agent(n_arms, c) {}
    int select() { return agent.select(++t); }
    void update(int arm, double reward) { agent.update(arm, reward); }
};

struct PyThompson {
    Thompson agent;
    Rng rng;
    PyThompson(int n_arms, std::uint64_t seed) : agent(n_arms), rng(make_rng(seed, 0)) {}
    int select() { return agent.select(rng); }
    void update(int arm, double reward) { agent.update(arm, reward, rng); }
};

py::dict summary_dict(const RunSummary& s) {
    py::dict d;
    d["mean_throughput_bps"] = s.mean_throughput_bps;
    d["cumulative_throughput_bits"] = s.cumulative_throughput_bits;
    d["mean_starving"] = s.mean_starving;
    d["mean_jain"] = s.mean_jain;
    d["mean_fairness"] = s.mean_fairness;
    d["mean_plr"] = s.mean_plr;
    d["mean_latency_s"] = s.mean_latency_s;
    d["mean_reward"] = s.mean_reward;
    d["cumulative_reward"] = s.cumulative_reward;
    d["convergence_step"] = s.convergence_step;
    return d;
}

} // namespace

PYBIND11_MODULE(_srsim, m) {
    m.doc() = "Spatial-reuse network simulator with multi-agent bandit control";

    // ------------------------------------------------------------- topology
    py::class_<TopologyParams>(m, "TopologyParams")
        .def(py::init<>())
        .def_readwrite("n_aps", &TopologyParams::n_aps)
        .def_readwrite("n_stations", &TopologyParams::n_stations)
        .def_readwrite("arena_w", &TopologyParams::arena_w)
        .def_readwrite("arena_h", &TopologyParams::arena_h)
        .def_readwrite("min_ap_separation_m", &TopologyParams::min_ap_separation_m)
        .def_readwrite("station_p_tx_dbm", &TopologyParams::station_p_tx_dbm)
        .def_readwrite("relocation_radius_m", &TopologyParams::relocation_radius_m);

    py::class_<Topology>(m, "Topology")
        .def_property_readonly("n_aps", &Topology::n_aps)
        .def_property_readonly("n_stations", &Topology::n_stations)
        .def_readonly("attachment", &Topology::attachment)
        .def("load_counts", &Topology::load_counts)
        .def("ap_positions",
             [](const Topology& t) {
                 std::vector<std::pair<double, double>> out;
                 for (const auto& ap : t.aps) out.emplace_back(ap.pos.x, ap.pos.y);
                 return out;
             })
        .def("station_positions",
             [](const Topology& t) {
                 std::vector<std::pair<double, double>> out;
                 for (const auto& s : t.stations) out.emplace_back(s.pos.x, s.pos.y);
                 return out;
             })
        .def("to_table", &Topology::to_table);

    m.def("build_topology", &build_topology, py::arg("seed"),
          py::arg("params") = TopologyParams{});
    m.def("attach_stations", &attach_stations);

    // ---------------------------------------------------------------- radio
    m.def("dbm_to_mw", &dbm_to_mw);
    m.def("mw_to_dbm", &mw_to_dbm);
    m.def("received_power_mw", &received_power_mw, py::arg("p_tx_mw"), py::arg("d_m"),
          py::arg("theta"), py::arg("ref_dist_m") = 1.0);
    m.def("cca_range_m", &cca_range_m);
    m.def("interferer_distance_m", &interferer_distance_m);
    m.def("worst_case_sinr", &worst_case_sinr);
    m.def("link_capacity_bps", &link_capacity_bps);

    py::class_<CapacitySurface>(m, "CapacitySurface")
        .def_readonly("tx_dbm", &CapacitySurface::tx_dbm)
        .def_readonly("cs_dbm", &CapacitySurface::cs_dbm)
        .def_readonly("c_total", &CapacitySurface::c_total)
        .def("argmax", &CapacitySurface::argmax)
        .def("to_csv", &CapacitySurface::to_csv);

    m.def(
        "capacity_surface",
        [](const Topology& topo, const std::vector<double>& tx, const std::vector<double>& cs) {
            return capacity_surface(topo, tx, cs);
        },
        py::arg("topology"), py::arg("tx_levels_dbm"), py::arg("cs_levels_dbm"));

    py::class_<RankedCell>(m, "RankedCell")
        .def_readonly("index", &RankedCell::index)
        .def_readonly("p_tx_dbm", &RankedCell::p_tx_dbm)
        .def_readonly("p_cs_dbm", &RankedCell::p_cs_dbm)
        .def_readonly("c_total", &RankedCell::c_total);
    m.def("reduce_action_set", &reduce_action_set);

    // ------------------------------------------------------------------ KPIs
    m.def("jain_index", [](const std::vector<double>& thr) { return jain_index(thr); });
    m.def("fairness_product", [](const std::vector<double>& thr, const std::vector<double>& ach) {
        return fairness_product(thr, ach);
    });
    m.def("reward_local",
          [](const std::vector<double>& thr, const std::vector<double>& ach, double omega) {
              return reward_local(thr, ach, omega);
          },
          py::arg("throughput"), py::arg("achievable"), py::arg("omega") = 0.1);
    m.def("reward_coop", &reward_coop);

    // --------------------------------------------------------------- bandits
    py::class_<Action>(m, "Action")
        .def(py::init<>())
        .def_readwrite("p_tx_dbm", &Action::p_tx_dbm)
        .def_readwrite("p_cs_dbm", &Action::p_cs_dbm);

    py::class_<ArmGrid>(m, "ArmGrid")
        .def_static("build", &ArmGrid::build)
        .def_static("reduced", &ArmGrid::reduced)
        .def_property_readonly("size", &ArmGrid::size)
        .def("action", &ArmGrid::action, py::return_value_policy::copy);

    py::class_<PyEpsilonGreedy>(m, "EpsilonGreedy")
        .def(py::init<int, double, std::uint64_t>(), py::arg("n_arms"),
             py::arg("epsilon0") = 1.0, py::arg("seed") = 0)
        .def("select", &PyEpsilonGreedy::select)
        .def("update", &PyEpsilonGreedy::update)
        .def_property_readonly("q", [](const PyEpsilonGreedy& a) { return a.agent.q(); });

    py::class_<PyUcb>(m, "Ucb")
        .def(py::init<int, double>(), py::arg("n_arms"), py::arg("c") = 1.0)
        .def("select", &PyUcb::select)
        .def("update", &PyUcb::update)
        .def_property_readonly("q", [](const PyUcb& a) { return a.agent.q(); });

    py::class_<PyThompson>(m, "Thompson")
        .def(py::init<int, std::uint64_t>(), py::arg("n_arms"), py::arg("seed") = 0)
        .def("select", &PyThompson::select)
        .def("update", &PyThompson::update)
        .def_property_readonly("alpha", [](const PyThompson& a) { return a.agent.alpha(); })
        .def_property_readonly("beta", [](const PyThompson& a) { return a.agent.beta(); });

    // ------------------------------------------------------------ SAU agent
    py::class_<Context>(m, "Context")
        .def(py::init([](double starving, double rssi, double noise) {
                 return Context{starving, rssi, noise};
             }),
             py::arg("starving_fraction"), py::arg("rssi_bucket"), py::arg("noise_scaled"))
        .def_readwrite("starving_fraction", &Context::starving_fraction)
        .def_readwrite("rssi_bucket", &Context::rssi_bucket)
        .def_readwrite("noise_scaled", &Context::noise_scaled);

    py::class_<TrainerConfig>(m, "TrainerConfig")
        .def(py::init<>())
        .def_readwrite("learning_rate", &TrainerConfig::learning_rate)
        .def_readwrite("batch_size", &TrainerConfig::batch_size)
        .def_readwrite("replay_capacity", &TrainerConfig::replay_capacity)
        .def_readwrite("n_hidden", &TrainerConfig::n_hidden);

    py::class_<TransferStrategy>(m, "TransferStrategy")
        .def(py::init([](const std::string& kind, std::vector<int> layers) {
                 return TransferStrategy{transfer_kind_from_string(kind), std::move(layers)};
             }),
             py::arg("kind"), py::arg("layers") = std::vector<int>{});

    py::class_<SauAgent>(m, "SauAgent")
        .def(py::init<int, const TrainerConfig&, std::uint64_t>(), py::arg("n_arms"),
             py::arg("config") = TrainerConfig{}, py::arg("seed") = 0)
        .def("select", &SauAgent::select)
        .def("update", &SauAgent::update)
        .def("predict",
             [](const SauAgent& a, const Context& ctx) {
                 std::vector<double> out(a.n_arms());
                 a.predict(ctx, out);
                 return out;
             })
        .def("apply_transfer", &SauAgent::apply_transfer)
        .def_property_readonly("t", &SauAgent::t)
        .def_property_readonly("j2", &SauAgent::j2)
        .def_property_readonly("n", &SauAgent::n)
        .def("save",
             [](const SauAgent& a) {
                 std::ostringstream os;
                 a.save(os);
                 return os.str();
             })
        .def_static("load", [](const std::string& text) {
            std::istringstream is(text);
            return SauAgent::load(is);
        });

    // ---------------------------------------------------------- experiments
    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_static("from_file", &ExperimentConfig::from_file)
        .def_static("from_text",
                    [](const std::string& text) {
                        return ExperimentConfig::from_keyvalues(KeyValueFile::parse(text));
                    })
        .def("to_text", &ExperimentConfig::to_text)
        .def("validate", &ExperimentConfig::validate);

    m.def(
        "run_experiment",
        [](const ExperimentConfig& cfg, std::uint64_t seed, bool with_csv) {
            py::dict out;
            if (with_csv) {
                std::ostringstream os;
                RunResult res = run_experiment(cfg, seed, &os);
                out["summary"] = summary_dict(res.summary);
                out["csv"] = os.str();
            } else {
                RunResult res = run_experiment(cfg, seed);
                out["summary"] = summary_dict(res.summary);
            }
            return out;
        },
        py::arg("config"), py::arg("seed"), py::arg("with_csv") = false);

    m.def("compare",
          [](const std::vector<std::pair<std::string, ExperimentConfig>>& configs,
             const std::vector<std::uint64_t>& seeds) { return compare(configs, seeds).to_csv(); });
    m.def("emit_default_configs", &emit_default_configs);
    m.def("kpi_csv_header", [] { return std::string(kKpiCsvHeader); });
}
