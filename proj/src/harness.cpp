#include "srsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "srsim/sau.hpp"

namespace srsim {

namespace {

// Master-seed stream indices; one stream per (agent, purpose) so adding an
// agent never perturbs another agent's draws.
constexpr std::uint64_t kStreamTopology = 0;
constexpr std::uint64_t kStreamRelocation = 1;
constexpr std::uint64_t kStreamAgentBase = 100;   // + ap id: bandit exploration
constexpr std::uint64_t kStreamSauBase = 200;     // + ap id: SAU internals

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median: empty sample");
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::uint64_t step_of(double time_s, double step_s) {
    // time 0 fires before the first step; steps are 1-based.
    return static_cast<std::uint64_t>(std::llround(time_s / step_s)) + 1;
}

void write_row(std::ostream& os, const KpiRecord& r) {
    os << r.t << ',' << r.ap << ',' << format_double(r.throughput_bps) << ',' << r.n_starving
       << ',' << format_double(r.fairness_prod) << ',' << format_double(r.jain) << ','
       << format_double(r.plr) << ',' << format_double(r.latency_s) << ','
       << format_double(r.reward_local) << ',' << format_double(r.reward_coop) << ','
       << format_double(r.p_tx_dbm) << ',' << format_double(r.p_cs_dbm) << '\n';
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void write_kpi_csv(std::ostream& os, const std::vector<KpiRecord>& records) {
    os << kKpiCsvHeader << '\n';
    for (const auto& r : records) write_row(os, r);
}

RunSummary summarize(const std::vector<KpiRecord>& records, int n_aps, double step_s) {
    if (n_aps < 1) throw std::invalid_argument("summarize: need at least one AP");
    if (records.empty() || records.size() % static_cast<std::size_t>(n_aps) != 0)
        throw std::invalid_argument("summarize: record count must be a positive multiple of the AP count");
    std::size_t n_steps = records.size() / static_cast<std::size_t>(n_aps);
    RunSummary s;
    std::vector<double> step_reward(n_steps, 0.0);
    double sum_thr = 0.0, sum_starv = 0.0, sum_jain = 0.0, sum_fair = 0.0;
    double sum_plr = 0.0, sum_lat = 0.0;
    for (std::size_t t = 0; t < n_steps; ++t) {
        double thr = 0.0, reward = 0.0;
        int starving = 0;
        for (int a = 0; a < n_aps; ++a) {
            const auto& r = records[t * static_cast<std::size_t>(n_aps) + static_cast<std::size_t>(a)];
            thr += r.throughput_bps;
            starving += r.n_starving;
            reward += r.reward_local;
            sum_fair += r.fairness_prod;
            sum_plr += r.plr;
            sum_lat += r.latency_s;
        }
        reward /= n_aps;
        step_reward[t] = reward;
        sum_thr += thr;
        sum_starv += starving;
        sum_jain += records[t * static_cast<std::size_t>(n_aps)].jain;
        s.cumulative_throughput_bits += thr * step_s;
        s.cumulative_reward += reward;
    }
    auto dn = static_cast<double>(n_steps);
    s.mean_throughput_bps = sum_thr / dn;
    s.mean_starving = sum_starv / dn;
    s.mean_jain = sum_jain / dn;
    s.mean_fairness = sum_fair / (dn * n_aps);
    s.mean_plr = sum_plr / (dn * n_aps);
    s.mean_latency_s = sum_lat / (dn * n_aps);
    s.mean_reward = s.cumulative_reward / dn;

    // First step after which the trailing-window mean reward stays within 5%
    // of the final trailing mean.
    std::size_t window = std::min<std::size_t>(500, n_steps);
    std::vector<double> trailing(n_steps + 1, 0.0);
    double acc = 0.0;
    for (std::size_t t = 0; t < n_steps; ++t) {
        acc += step_reward[t];
        if (t >= window) acc -= step_reward[t - window];
        if (t + 1 >= window) trailing[t + 1] = acc / static_cast<double>(window);
    }
    double final_mean = trailing[n_steps];
    double tol = 0.05 * std::max(std::abs(final_mean), 1e-12);
    std::size_t conv = window;
    for (std::size_t t = n_steps; t >= window; --t) {
        if (std::abs(trailing[t] - final_mean) > tol) {
            conv = t + 1;
            break;
        }
        if (t == window) break;
    }
    s.convergence_step = conv;
    return s;
}

RunResult run_experiment(const ExperimentConfig& config, std::uint64_t seed, std::ostream* csv) {
    config.validate();
    const double step_s = config.phy.step_s;
    const int n_aps = config.topology.n_aps;

    Topology topo = build_topology(derive_seed(seed, kStreamTopology), config.topology);
    Environment env(std::move(topo), config.phy, TrafficModel{config.offered_gbps * 1e9},
                    config.omega, config.a1, config.a2, config.bounds);
    Rng reloc_rng = make_rng(seed, kStreamRelocation);

    ArmGrid grid = config.make_grid();
    const int n_arms = grid.size();

    std::vector<EpsilonGreedy> egreedy;
    std::vector<Ucb> ucb;
    std::vector<Thompson> thompson;
    std::vector<std::unique_ptr<SauAgent>> sau;
    std::vector<Rng> agent_rng;
    const bool learning = config.algo != Algo::fixed;
    for (int a = 0; a < n_aps; ++a) {
        agent_rng.push_back(make_rng(seed, kStreamAgentBase + static_cast<std::uint64_t>(a)));
        switch (config.algo) {
            case Algo::egreedy:
            case Algo::coop_egreedy:
                egreedy.emplace_back(n_arms, config.epsilon0);
                break;
            case Algo::ucb:
                ucb.emplace_back(n_arms, config.ucb_c);
                break;
            case Algo::thompson:
                thompson.emplace_back(n_arms);
                break;
            case Algo::sau:
            case Algo::sau_coop:
                sau.push_back(std::make_unique<SauAgent>(
                    n_arms, config.trainer,
                    derive_seed(seed, kStreamSauBase + static_cast<std::uint64_t>(a))));
                break;
            case Algo::fixed:
                break;
        }
    }

    // Load events indexed by the step before which they apply.
    std::vector<std::pair<std::uint64_t, const LoadEvent*>> load_at;
    for (const auto& ev : config.schedule.events)
        load_at.emplace_back(step_of(ev.time_s, step_s), &ev);
    std::vector<std::uint64_t> transfer_at;
    for (double t : config.transfer.event_times_s) transfer_at.push_back(step_of(t, step_s));

    RunResult result;
    result.records.reserve(config.horizon * static_cast<std::size_t>(n_aps));
    result.arm_trace.assign(static_cast<std::size_t>(n_aps), {});
    if (csv) *csv << kKpiCsvHeader << '\n';

    std::vector<Context> ctx(static_cast<std::size_t>(n_aps),
                             Context{0.0, 0.5, config.phy.noise_dbm / 100.0});
    std::vector<Action> actions(static_cast<std::size_t>(n_aps));
    std::vector<int> arms(static_cast<std::size_t>(n_aps), 0);

    std::size_t next_load = 0, next_transfer = 0;
    for (std::uint64_t t = 1; t <= config.horizon; ++t) {
        while (next_load < load_at.size() && load_at[next_load].first == t) {
            env.apply_load_event(*load_at[next_load].second, config.topology.relocation_radius_m,
                                 reloc_rng);
            ++next_load;
        }
        while (next_transfer < transfer_at.size() && transfer_at[next_transfer] == t) {
            for (auto& agent : sau) agent->apply_transfer(config.transfer.strategy);
            ++next_transfer;
        }

        for (int a = 0; a < n_aps; ++a) {
            auto ai = static_cast<std::size_t>(a);
            switch (config.algo) {
                case Algo::egreedy:
                case Algo::coop_egreedy:
                    arms[ai] = egreedy[ai].select(t, agent_rng[ai]);
                    break;
                case Algo::ucb:
                    arms[ai] = ucb[ai].select(t);
                    break;
                case Algo::thompson:
                    arms[ai] = thompson[ai].select(agent_rng[ai]);
                    break;
                case Algo::sau:
                case Algo::sau_coop:
                    arms[ai] = sau[ai]->select(ctx[ai]);
                    break;
                case Algo::fixed:
                    break;
            }
            actions[ai] = learning ? grid.action(arms[ai]) : config.fixed_action;
        }

        StepResult res = env.step(actions);

        for (int a = 0; a < n_aps; ++a) {
            auto ai = static_cast<std::size_t>(a);
            double r = res.reward_local[ai];
            if (!std::isfinite(r) || !std::isfinite(res.kpis.ap[ai].throughput_bps))
                throw std::runtime_error("run: non-finite KPI at step " + std::to_string(t));
            switch (config.algo) {
                case Algo::egreedy:
                    egreedy[ai].update(arms[ai], r);
                    break;
                case Algo::coop_egreedy: {
                    std::vector<double> others;
                    others.reserve(static_cast<std::size_t>(n_aps) - 1);
                    for (int b = 0; b < n_aps; ++b)
                        if (b != a) others.push_back(res.reward_local[static_cast<std::size_t>(b)]);
                    egreedy[ai].coop_update(arms[ai], r, others, config.beta);
                    break;
                }
                case Algo::ucb:
                    ucb[ai].update(arms[ai], r);
                    break;
                case Algo::thompson:
                    thompson[ai].update(arms[ai], r, agent_rng[ai]);
                    break;
                case Algo::sau:
                    sau[ai]->update(ctx[ai], arms[ai], r);
                    break;
                case Algo::sau_coop:
                    sau[ai]->update(ctx[ai], arms[ai], res.reward_coop[ai]);
                    break;
                case Algo::fixed:
                    break;
            }
            if (learning) result.arm_trace[ai].push_back(arms[ai]);

            KpiRecord rec{t,
                          a,
                          res.kpis.ap[ai].throughput_bps,
                          res.kpis.ap[ai].n_starving,
                          res.kpis.ap[ai].fairness_prod,
                          res.kpis.jain,
                          res.kpis.ap[ai].plr,
                          res.kpis.ap[ai].latency_s,
                          r,
                          res.reward_coop[ai],
                          actions[ai].p_tx_dbm,
                          actions[ai].p_cs_dbm};
            if (csv) write_row(*csv, rec);
            result.records.push_back(rec);
        }
        ctx = res.contexts;

        if (!sau.empty() && t % 500 == 0)
            for (const auto& agent : sau)
                if (!agent->network().finite())
                    throw std::runtime_error("run: non-finite network parameters at step " +
                                             std::to_string(t));
    }

    result.summary = summarize(result.records, n_aps, step_s);
    return result;
}

namespace {

constexpr const char* kCompareHeader =
    "name,mean_throughput_bps,cumulative_throughput_bits,mean_starving,mean_jain,"
    "mean_fairness,mean_plr,mean_latency_s,mean_reward,cumulative_reward,convergence_step";

void append_fields(std::ostream& os, const RunSummary& s) {
    os << format_double(s.mean_throughput_bps) << ',' << format_double(s.cumulative_throughput_bits)
       << ',' << format_double(s.mean_starving) << ',' << format_double(s.mean_jain) << ','
       << format_double(s.mean_fairness) << ',' << format_double(s.mean_plr) << ','
       << format_double(s.mean_latency_s) << ',' << format_double(s.mean_reward) << ','
       << format_double(s.cumulative_reward) << ',' << s.convergence_step;
}

RunSummary delta(const RunSummary& a, const RunSummary& b) {
    RunSummary d;
    d.mean_throughput_bps = a.mean_throughput_bps - b.mean_throughput_bps;
    d.cumulative_throughput_bits = a.cumulative_throughput_bits - b.cumulative_throughput_bits;
    d.mean_starving = a.mean_starving - b.mean_starving;
    d.mean_jain = a.mean_jain - b.mean_jain;
    d.mean_fairness = a.mean_fairness - b.mean_fairness;
    d.mean_plr = a.mean_plr - b.mean_plr;
    d.mean_latency_s = a.mean_latency_s - b.mean_latency_s;
    d.mean_reward = a.mean_reward - b.mean_reward;
    d.cumulative_reward = a.cumulative_reward - b.cumulative_reward;
    return d;
}

void append_delta_fields(std::ostream& os, const RunSummary& a, const RunSummary& b) {
    RunSummary d = delta(a, b);
    os << format_double(d.mean_throughput_bps) << ',' << format_double(d.cumulative_throughput_bits)
       << ',' << format_double(d.mean_starving) << ',' << format_double(d.mean_jain) << ','
       << format_double(d.mean_fairness) << ',' << format_double(d.mean_plr) << ','
       << format_double(d.mean_latency_s) << ',' << format_double(d.mean_reward) << ','
       << format_double(d.cumulative_reward) << ','
       << (static_cast<long long>(a.convergence_step) - static_cast<long long>(b.convergence_step));
}

} // namespace

std::string CompareResult::to_csv() const {
    std::ostringstream os;
    os << kCompareHeader << '\n';
    for (const auto& row : rows) {
        os << row.name << ',';
        append_fields(os, row.median);
        os << '\n';
    }
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
            os << rows[i].name << "-" << rows[j].name << ',';
            append_delta_fields(os, rows[i].median, rows[j].median);
            os << '\n';
        }
    return os.str();
}

std::string CompareResult::to_table() const {
    std::ostringstream os;
    auto line = [&](const std::string& name, const std::string& thr, const std::string& starv,
                    const std::string& jain, const std::string& fair, const std::string& reward,
                    const std::string& conv) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%-28s %14s %10s %8s %8s %10s %8s\n", name.c_str(),
                      thr.c_str(), starv.c_str(), jain.c_str(), fair.c_str(), reward.c_str(),
                      conv.c_str());
        os << buf;
    };
    line("name", "thr_bps", "starving", "jain", "fair", "reward", "conv");
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.4g", v);
        return std::string(buf);
    };
    for (const auto& row : rows)
        line(row.name, num(row.median.mean_throughput_bps), num(row.median.mean_starving),
             num(row.median.mean_jain), num(row.median.mean_fairness), num(row.median.mean_reward),
             std::to_string(row.median.convergence_step));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
            RunSummary d = delta(rows[i].median, rows[j].median);
            line(rows[i].name + "-" + rows[j].name, num(d.mean_throughput_bps),
                 num(d.mean_starving), num(d.mean_jain), num(d.mean_fairness), num(d.mean_reward),
                 std::to_string(static_cast<long long>(rows[i].median.convergence_step) -
                                static_cast<long long>(rows[j].median.convergence_step)));
        }
    return os.str();
}

CompareResult compare(const std::vector<std::pair<std::string, ExperimentConfig>>& configs,
                      const std::vector<std::uint64_t>& seeds) {
    if (configs.empty()) throw std::invalid_argument("compare: need at least one config");
    if (seeds.empty()) throw std::invalid_argument("compare: need at least one seed");
    std::string fingerprint = configs.front().second.scenario_fingerprint();
    for (const auto& [name, cfg] : configs)
        if (cfg.scenario_fingerprint() != fingerprint)
            throw std::invalid_argument("compare: config '" + name +
                                        "' does not share the common scenario");
    CompareResult out;
    for (const auto& [name, cfg] : configs) {
        std::vector<RunSummary> sums;
        sums.reserve(seeds.size());
        for (std::uint64_t seed : seeds) sums.push_back(run_experiment(cfg, seed).summary);
        auto med = [&](auto field) {
            std::vector<double> v;
            v.reserve(sums.size());
            for (const auto& s : sums) v.push_back(static_cast<double>(s.*field));
            return median(std::move(v));
        };
        RunSummary m;
        m.mean_throughput_bps = med(&RunSummary::mean_throughput_bps);
        m.cumulative_throughput_bits = med(&RunSummary::cumulative_throughput_bits);
        m.mean_starving = med(&RunSummary::mean_starving);
        m.mean_jain = med(&RunSummary::mean_jain);
        m.mean_fairness = med(&RunSummary::mean_fairness);
        m.mean_plr = med(&RunSummary::mean_plr);
        m.mean_latency_s = med(&RunSummary::mean_latency_s);
        m.mean_reward = med(&RunSummary::mean_reward);
        m.cumulative_reward = med(&RunSummary::cumulative_reward);
        m.convergence_step = static_cast<std::uint64_t>(
            std::llround(med(&RunSummary::convergence_step)));
        out.rows.push_back({name, m});
    }
    return out;
}

std::vector<std::string> emit_default_configs(const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const ExperimentConfig& cfg) {
        cfg.validate();
        fs::path path = fs::path(dir) / name;
        std::ofstream out(path);
        if (!out) throw std::runtime_error("init-configs: cannot write '" + path.string() + "'");
        out << cfg.to_text();
        written.push_back(path.string());
    };

    // Static traffic sweep, learned reduced action set.
    for (double gbps : {0.011, 0.056, 0.11, 0.16}) {
        ExperimentConfig c;
        c.offered_gbps = gbps;
        c.algo = Algo::egreedy;
        c.grid_mode = GridMode::reduced;
        char name[64];
        std::snprintf(name, sizeof(name), "static-egreedy-%.3g.cfg", gbps);
        emit(name, c);
    }

    // Reduced-vs-full action-set study at the default rate.
    {
        ExperimentConfig c;
        c.grid_mode = GridMode::full;
        c.algo = Algo::egreedy;
        emit("study-egreedy-full.cfg", c);
        c.algo = Algo::ucb;
        emit("study-ucb-full.cfg", c);
        c.algo = Algo::thompson;
        emit("study-thompson-full.cfg", c);
        c.algo = Algo::egreedy;
        c.grid_mode = GridMode::reduced;
        emit("study-egreedy-reduced.cfg", c);
    }

    // Cooperation study at the highest rate, full action set.
    {
        ExperimentConfig c;
        c.offered_gbps = 0.16;
        c.grid_mode = GridMode::full;
        c.algo = Algo::sau_coop;
        emit("coop-sau.cfg", c);
        c.algo = Algo::sau;
        emit("coop-sau-noncoop.cfg", c);
        c.algo = Algo::coop_egreedy;
        emit("coop-rew-egreedy.cfg", c);
        c.algo = Algo::egreedy;
        emit("coop-egreedy-noncoop.cfg", c);
    }

    // Dynamic load-redistribution scenario with transfer strategies.
    {
        ExperimentConfig c;
        c.topology.n_aps = 3;
        c.topology.n_stations = 15;
        // near the service boundary so load shifts produce visible transients
        c.offered_gbps = 0.03;
        c.schedule.events = {{0.0, {8, 5, 2}}, {180.0, {5, 5, 5}}, {360.0, {2, 2, 11}}};
        c.horizon = 12000;
        c.grid_mode = GridMode::reduced;
        c.algo = Algo::sau;
        c.transfer.enabled = true;
        c.transfer.event_times_s = {180.0, 360.0};
        c.transfer.strategy.kind = TransferKind::partial_transfer;
        c.transfer.strategy.layers = {2};
        emit("dynamic-partial.cfg", c);
        c.transfer.strategy.kind = TransferKind::full_transfer;
        c.transfer.strategy.layers.clear();
        emit("dynamic-full.cfg", c);
        c.transfer.strategy.kind = TransferKind::forget;
        emit("dynamic-forget.cfg", c);
    }

    // Fixed no-learning baselines.
    {
        ExperimentConfig c;
        c.algo = Algo::fixed;
        c.fixed_action = {16.0, -82.0};
        emit("baseline-16--82.cfg", c);
        c.fixed_action = {16.0, -62.0};
        emit("baseline-16--62.cfg", c);
    }

    return written;
}

} // namespace srsim
