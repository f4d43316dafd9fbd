#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "srsim/config.hpp"
#include "srsim/harness.hpp"
#include "srsim/radio.hpp"

namespace fs = std::filesystem;
using namespace srsim;

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
    // "1..10" or "3,7,11"
    std::vector<std::uint64_t> seeds;
    auto dots = spec.find("..");
    if (dots != std::string::npos) {
        std::uint64_t lo = std::stoull(spec.substr(0, dots));
        std::uint64_t hi = std::stoull(spec.substr(dots + 2));
        if (hi < lo) throw std::invalid_argument("--seeds: range end before start");
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        return seeds;
    }
    std::size_t pos = 0;
    while (pos < spec.size()) {
        auto comma = spec.find(',', pos);
        if (comma == std::string::npos) comma = spec.size();
        seeds.push_back(std::stoull(spec.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    if (seeds.empty()) throw std::invalid_argument("--seeds: empty seed list");
    return seeds;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

int cmd_run(const std::string& config_path, std::uint64_t seed, const std::string& out_dir) {
    ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
    fs::create_directories(out_dir);
    fs::path base = fs::path(out_dir) / (fs::path(config_path).stem().string() + "-seed" +
                                         std::to_string(seed));
    auto csv = open_out(base.string() + ".kpi.csv");
    RunResult res = run_experiment(cfg, seed, &csv);
    auto sum = open_out(base.string() + ".summary.csv");
    sum << "mean_throughput_bps,cumulative_throughput_bits,mean_starving,mean_jain,"
           "mean_fairness,mean_plr,mean_latency_s,mean_reward,cumulative_reward,convergence_step\n"
        << format_double(res.summary.mean_throughput_bps) << ','
        << format_double(res.summary.cumulative_throughput_bits) << ','
        << format_double(res.summary.mean_starving) << ','
        << format_double(res.summary.mean_jain) << ','
        << format_double(res.summary.mean_fairness) << ','
        << format_double(res.summary.mean_plr) << ','
        << format_double(res.summary.mean_latency_s) << ','
        << format_double(res.summary.mean_reward) << ','
        << format_double(res.summary.cumulative_reward) << ','
        << res.summary.convergence_step << '\n';
    std::cout << "wrote " << base.string() << ".kpi.csv\n";
    return 0;
}

int cmd_compare(const std::string& configs_arg, const std::string& seeds_arg,
                const std::string& out_dir) {
    std::vector<std::pair<std::string, ExperimentConfig>> configs;
    std::size_t pos = 0;
    while (pos < configs_arg.size()) {
        auto comma = configs_arg.find(',', pos);
        if (comma == std::string::npos) comma = configs_arg.size();
        std::string path = configs_arg.substr(pos, comma - pos);
        configs.emplace_back(fs::path(path).stem().string(), ExperimentConfig::from_file(path));
        pos = comma + 1;
    }
    if (configs.size() < 2) throw std::invalid_argument("--configs: need at least two configs");
    CompareResult result = compare(configs, parse_seeds(seeds_arg));
    fs::create_directories(out_dir);
    open_out(fs::path(out_dir) / "compare.csv") << result.to_csv();
    std::string table = result.to_table();
    open_out(fs::path(out_dir) / "compare.txt") << table;
    std::cout << table;
    return 0;
}

int cmd_surface(const std::string& config_path, std::uint64_t seed, const std::string& out_file) {
    ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
    Topology topo = build_topology(derive_seed(seed, 0), cfg.topology);
    ArmGrid grid = ArmGrid::build(cfg.bounds.cs_min_dbm, cfg.bounds.cs_max_dbm, cfg.l_cs,
                                  cfg.bounds.tx_min_dbm, cfg.bounds.tx_max_dbm, cfg.l_tx);
    SurfaceParams params;
    params.theta = cfg.phy.theta;
    params.bandwidth_hz = cfg.phy.bandwidth_hz;
    params.noise_floor_dbm = cfg.phy.noise_dbm;
    CapacitySurface surface = capacity_surface(topo, grid.tx_dbm, grid.cs_dbm, params);
    open_out(out_file) << surface.to_csv();
    std::cout << "wrote " << out_file << "\n";
    return 0;
}

int cmd_init_configs(const std::string& out_dir) {
    for (const auto& path : emit_default_configs(out_dir)) std::cout << "wrote " << path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spatial-reuse bandit simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", out_file, configs_arg, seeds_arg = "1..10";
    std::uint64_t seed = 1;

    auto* run = app.add_subcommand("run", "run one seeded experiment");
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_option("--seed", seed, "master seed");
    run->add_option("--out", out_dir, "output directory");

    auto* cmp = app.add_subcommand("compare", "per-config KPI medians over seeds");
    cmp->add_option("--configs", configs_arg, "comma-separated config files")->required();
    cmp->add_option("--seeds", seeds_arg, "seed list: lo..hi or a,b,c");
    cmp->add_option("--out", out_dir, "output directory");

    auto* surf = app.add_subcommand("surface", "export the analytic capacity surface");
    surf->add_option("--config", config_path, "experiment config file")->required();
    surf->add_option("--seed", seed, "topology seed");
    surf->add_option("--out", out_file, "output CSV file")->required();

    auto* init = app.add_subcommand("init-configs", "write the default experiment configs");
    init->add_option("--out", out_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, seed, out_dir);
        if (cmp->parsed()) return cmd_compare(configs_arg, seeds_arg, out_dir);
        if (surf->parsed()) return cmd_surface(config_path, seed, out_file);
        if (init->parsed()) return cmd_init_configs(out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
