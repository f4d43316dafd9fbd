#include "srsim/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace srsim {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream iss(s);
    while (std::getline(iss, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw std::invalid_argument(key + ": expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return static_cast<int>(d);
    } catch (...) {
        throw std::invalid_argument(key + ": expected an integer, got '" + v + "'");
    }
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

} // namespace

KeyValueFile KeyValueFile::parse(const std::string& text) {
    KeyValueFile kv;
    std::istringstream iss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(iss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        if (kv.entries_.count(key))
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": duplicate key '" + key + "'");
        kv.entries_[key] = val;
    }
    return kv;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

bool KeyValueFile::has(const std::string& key) const { return entries_.count(key) != 0; }

std::string KeyValueFile::get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw std::invalid_argument(key + ": missing required key");
    return it->second;
}

std::string KeyValueFile::get_or(const std::string& key, const std::string& def) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? def : it->second;
}

double KeyValueFile::get_double(const std::string& key, double def) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? def : parse_double(key, it->second);
}

int KeyValueFile::get_int(const std::string& key, int def) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? def : parse_int(key, it->second);
}

std::vector<double> KeyValueFile::get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (const auto& tok : split(get(key), ','))
        out.push_back(parse_double(key, tok));
    return out;
}

Algo algo_from_string(const std::string& s) {
    if (s == "egreedy") return Algo::egreedy;
    if (s == "ucb") return Algo::ucb;
    if (s == "thompson") return Algo::thompson;
    if (s == "coop_egreedy") return Algo::coop_egreedy;
    if (s == "sau") return Algo::sau;
    if (s == "sau_coop") return Algo::sau_coop;
    if (s == "fixed") return Algo::fixed;
    throw std::invalid_argument(
        "algo: expected egreedy|ucb|thompson|coop_egreedy|sau|sau_coop|fixed, got '" + s + "'");
}

std::string to_string(Algo a) {
    switch (a) {
        case Algo::egreedy: return "egreedy";
        case Algo::ucb: return "ucb";
        case Algo::thompson: return "thompson";
        case Algo::coop_egreedy: return "coop_egreedy";
        case Algo::sau: return "sau";
        case Algo::sau_coop: return "sau_coop";
        case Algo::fixed: return "fixed";
    }
    return "?";
}

namespace {

GridMode grid_mode_from_string(const std::string& s) {
    if (s == "full") return GridMode::full;
    if (s == "reduced") return GridMode::reduced;
    if (s == "explicit") return GridMode::explicit_list;
    throw std::invalid_argument("grid.mode: expected full|reduced|explicit, got '" + s + "'");
}

std::string to_string(GridMode m) {
    switch (m) {
        case GridMode::full: return "full";
        case GridMode::reduced: return "reduced";
        case GridMode::explicit_list: return "explicit";
    }
    return "?";
}

// "time:c0,c1,... ; time:c0,c1,..." -> load events
LoadSchedule parse_schedule(const std::string& key, const std::string& text) {
    LoadSchedule sched;
    if (trim(text).empty()) return sched;
    for (const auto& part : split(text, ';')) {
        if (part.empty()) continue;
        auto colon = part.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument(key + ": expected 'time:count,count,...', got '" + part + "'");
        LoadEvent ev;
        ev.time_s = parse_double(key, trim(part.substr(0, colon)));
        for (const auto& c : split(part.substr(colon + 1), ','))
            ev.counts.push_back(parse_int(key, c));
        sched.events.push_back(std::move(ev));
    }
    return sched;
}

std::string schedule_to_string(const LoadSchedule& sched) {
    std::string out;
    for (std::size_t i = 0; i < sched.events.size(); ++i) {
        if (i) out += "; ";
        out += fmt(sched.events[i].time_s) + ":";
        for (std::size_t j = 0; j < sched.events[i].counts.size(); ++j) {
            if (j) out += ",";
            out += std::to_string(sched.events[i].counts[j]);
        }
    }
    return out;
}

// "tx/cs ; tx/cs ; ..."
std::vector<Action> parse_actions(const std::string& key, const std::string& text) {
    std::vector<Action> out;
    for (const auto& part : split(text, ';')) {
        if (part.empty()) continue;
        auto slash = part.find('/');
        if (slash == std::string::npos)
            throw std::invalid_argument(key + ": expected 'tx/cs', got '" + part + "'");
        out.push_back({parse_double(key, trim(part.substr(0, slash))),
                       parse_double(key, trim(part.substr(slash + 1)))});
    }
    return out;
}

std::string actions_to_string(const std::vector<Action>& actions) {
    std::string out;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (i) out += "; ";
        out += fmt(actions[i].p_tx_dbm) + "/" + fmt(actions[i].p_cs_dbm);
    }
    return out;
}

std::vector<int> parse_layers(const std::string& key, const std::string& text) {
    std::vector<int> out;
    for (const auto& tok : split(text, ','))
        if (!tok.empty()) out.push_back(parse_int(key, tok));
    return out;
}

} // namespace

ArmGrid ExperimentConfig::make_grid() const {
    switch (grid_mode) {
        case GridMode::full:
            return ArmGrid::build(bounds.cs_min_dbm, bounds.cs_max_dbm, l_cs,
                                  bounds.tx_min_dbm, bounds.tx_max_dbm, l_tx);
        case GridMode::reduced:
            return ArmGrid::reduced();
        case GridMode::explicit_list:
            return ArmGrid::from_actions(explicit_actions);
    }
    throw std::logic_error("grid.mode: unknown mode");
}

void ExperimentConfig::validate() const {
    if (topology.n_aps < 1) throw std::invalid_argument("topology.n_aps: must be >= 1");
    if (topology.n_stations < 0) throw std::invalid_argument("topology.n_stations: must be >= 0");
    if (topology.arena_w <= 0 || topology.arena_h <= 0)
        throw std::invalid_argument("topology.arena: dimensions must be > 0");
    if (topology.min_ap_separation_m < 0)
        throw std::invalid_argument("topology.min_ap_separation_m: must be >= 0");
    if (topology.relocation_radius_m <= 0)
        throw std::invalid_argument("topology.relocation_radius_m: must be > 0");
    if (offered_gbps <= 0) throw std::invalid_argument("traffic.offered_gbps: must be > 0");
    schedule.validate(topology.n_aps, topology.n_stations);
    if (epsilon0 < 0 || epsilon0 > 1)
        throw std::invalid_argument("epsilon0: must be in [0,1]");
    if (ucb_c < 0) throw std::invalid_argument("c: must be >= 0");
    if (beta < 0) throw std::invalid_argument("beta: must be >= 0");
    if (trainer.learning_rate <= 0) throw std::invalid_argument("sau.learning_rate: must be > 0");
    if (trainer.rms_decay <= 0 || trainer.rms_decay >= 1)
        throw std::invalid_argument("sau.rms_decay: must be in (0,1)");
    if (trainer.weight_decay < 0) throw std::invalid_argument("sau.weight_decay: must be >= 0");
    if (trainer.batch_size < 1) throw std::invalid_argument("sau.batch_size: must be >= 1");
    if (trainer.replay_capacity < trainer.batch_size)
        throw std::invalid_argument("sau.replay_capacity: must be >= sau.batch_size");
    if (trainer.n_hidden < 1) throw std::invalid_argument("sau.n_hidden: must be >= 1");
    if (grid_mode == GridMode::full && (l_cs < 1 || l_tx < 1))
        throw std::invalid_argument("grid.l_cs/grid.l_tx: must be >= 1");
    if (grid_mode == GridMode::explicit_list && explicit_actions.empty())
        throw std::invalid_argument("grid.actions: explicit grid needs at least one action");
    phy.validate();
    if (omega <= 0 || omega > 1) throw std::invalid_argument("reward.omega: must be in (0,1]");
    if (a1 < 0 || a2 < 0 || std::abs(a1 + a2 - 1.0) > 1e-12)
        throw std::invalid_argument("reward.a1/reward.a2: must be nonnegative and sum to 1");
    if (bounds.tx_min_dbm > bounds.tx_max_dbm || bounds.cs_min_dbm > bounds.cs_max_dbm)
        throw std::invalid_argument("bounds: min must be <= max");
    if (horizon < 1) throw std::invalid_argument("run.horizon: must be >= 1");
    ArmGrid grid = make_grid();
    for (const auto& a : grid.arms)
        if (!bounds.contains(a))
            throw std::invalid_argument("grid: arm outside the action bounds");
    if (algo == Algo::fixed && !bounds.contains(fixed_action))
        throw std::invalid_argument("fixed.tx_dbm/fixed.cs_dbm: outside the action bounds");
    if (transfer.enabled) {
        transfer.strategy.validate(Mlp::n_layers());
        if (transfer.event_times_s.empty())
            throw std::invalid_argument("transfer.events: transfer enabled with no events");
        double prev = -1.0;
        for (double t : transfer.event_times_s) {
            if (t <= prev)
                throw std::invalid_argument("transfer.events: must be strictly increasing");
            prev = t;
        }
        if (algo != Algo::sau && algo != Algo::sau_coop)
            throw std::invalid_argument("transfer.enabled: requires algo = sau or sau_coop");
    }
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    return from_keyvalues(KeyValueFile::load(path));
}

ExperimentConfig ExperimentConfig::from_keyvalues(const KeyValueFile& kv) {
    ExperimentConfig c;
    c.topology.n_aps = kv.get_int("topology.n_aps", c.topology.n_aps);
    c.topology.n_stations = kv.get_int("topology.n_stations", c.topology.n_stations);
    c.topology.arena_w = kv.get_double("topology.arena_w", c.topology.arena_w);
    c.topology.arena_h = kv.get_double("topology.arena_h", c.topology.arena_h);
    c.topology.min_ap_separation_m =
        kv.get_double("topology.min_ap_separation_m", c.topology.min_ap_separation_m);
    c.topology.station_p_tx_dbm =
        kv.get_double("topology.station_p_tx_dbm", c.topology.station_p_tx_dbm);
    c.topology.relocation_radius_m =
        kv.get_double("topology.relocation_radius_m", c.topology.relocation_radius_m);
    c.offered_gbps = kv.get_double("traffic.offered_gbps", c.offered_gbps);
    if (kv.has("schedule.events"))
        c.schedule = parse_schedule("schedule.events", kv.get("schedule.events"));
    c.algo = algo_from_string(kv.get_or("algo", to_string(c.algo)));
    c.epsilon0 = kv.get_double("epsilon0", c.epsilon0);
    c.ucb_c = kv.get_double("c", c.ucb_c);
    c.beta = kv.get_double("beta", c.beta);
    c.fixed_action.p_tx_dbm = kv.get_double("fixed.tx_dbm", c.fixed_action.p_tx_dbm);
    c.fixed_action.p_cs_dbm = kv.get_double("fixed.cs_dbm", c.fixed_action.p_cs_dbm);
    c.trainer.learning_rate = kv.get_double("sau.learning_rate", c.trainer.learning_rate);
    c.trainer.rms_decay = kv.get_double("sau.rms_decay", c.trainer.rms_decay);
    c.trainer.weight_decay = kv.get_double("sau.weight_decay", c.trainer.weight_decay);
    c.trainer.batch_size = kv.get_int("sau.batch_size", c.trainer.batch_size);
    c.trainer.replay_capacity = kv.get_int("sau.replay_capacity", c.trainer.replay_capacity);
    c.trainer.n_hidden = kv.get_int("sau.n_hidden", c.trainer.n_hidden);
    c.grid_mode = grid_mode_from_string(kv.get_or("grid.mode", to_string(c.grid_mode)));
    c.l_cs = kv.get_int("grid.l_cs", c.l_cs);
    c.l_tx = kv.get_int("grid.l_tx", c.l_tx);
    if (kv.has("grid.actions"))
        c.explicit_actions = parse_actions("grid.actions", kv.get("grid.actions"));
    c.phy.idle_slot_s = kv.get_double("phy.idle_slot_s", c.phy.idle_slot_s);
    c.phy.t_edca_s = kv.get_double("phy.t_edca_s", c.phy.t_edca_s);
    c.phy.t_txop_s = kv.get_double("phy.t_txop_s", c.phy.t_txop_s);
    c.phy.noise_dbm = kv.get_double("phy.noise_dbm", c.phy.noise_dbm);
    c.phy.theta = kv.get_double("phy.theta", c.phy.theta);
    c.phy.ref_loss_db = kv.get_double("phy.ref_loss_db", c.phy.ref_loss_db);
    c.phy.bandwidth_hz = kv.get_double("phy.bandwidth_hz", c.phy.bandwidth_hz);
    c.phy.step_s = kv.get_double("phy.step_s", c.phy.step_s);
    c.phy.collision_floor_dbm = kv.get_double("phy.collision_floor_dbm", c.phy.collision_floor_dbm);
    c.phy.collision_cost = kv.get_double("phy.collision_cost", c.phy.collision_cost);
    c.omega = kv.get_double("reward.omega", c.omega);
    c.a1 = kv.get_double("reward.a1", c.a1);
    c.a2 = kv.get_double("reward.a2", c.a2);
    c.bounds.tx_min_dbm = kv.get_double("bounds.tx_min_dbm", c.bounds.tx_min_dbm);
    c.bounds.tx_max_dbm = kv.get_double("bounds.tx_max_dbm", c.bounds.tx_max_dbm);
    c.bounds.cs_min_dbm = kv.get_double("bounds.cs_min_dbm", c.bounds.cs_min_dbm);
    c.bounds.cs_max_dbm = kv.get_double("bounds.cs_max_dbm", c.bounds.cs_max_dbm);
    c.horizon = static_cast<std::uint64_t>(kv.get_int("run.horizon", static_cast<int>(c.horizon)));
    c.transfer.enabled = kv.get_int("transfer.enabled", c.transfer.enabled ? 1 : 0) != 0;
    if (kv.has("transfer.strategy"))
        c.transfer.strategy.kind = transfer_kind_from_string(kv.get("transfer.strategy"));
    if (kv.has("transfer.layers"))
        c.transfer.strategy.layers = parse_layers("transfer.layers", kv.get("transfer.layers"));
    if (kv.has("transfer.events"))
        c.transfer.event_times_s = kv.get_doubles("transfer.events");
    c.validate();
    return c;
}

std::string ExperimentConfig::to_text() const {
    std::ostringstream os;
    os << "topology.n_aps = " << topology.n_aps << "\n";
    os << "topology.n_stations = " << topology.n_stations << "\n";
    os << "topology.arena_w = " << fmt(topology.arena_w) << "\n";
    os << "topology.arena_h = " << fmt(topology.arena_h) << "\n";
    os << "topology.min_ap_separation_m = " << fmt(topology.min_ap_separation_m) << "\n";
    os << "topology.station_p_tx_dbm = " << fmt(topology.station_p_tx_dbm) << "\n";
    os << "topology.relocation_radius_m = " << fmt(topology.relocation_radius_m) << "\n";
    os << "traffic.offered_gbps = " << fmt(offered_gbps) << "\n";
    if (!schedule.events.empty())
        os << "schedule.events = " << schedule_to_string(schedule) << "\n";
    os << "algo = " << to_string(algo) << "\n";
    os << "epsilon0 = " << fmt(epsilon0) << "\n";
    os << "c = " << fmt(ucb_c) << "\n";
    os << "beta = " << fmt(beta) << "\n";
    os << "fixed.tx_dbm = " << fmt(fixed_action.p_tx_dbm) << "\n";
    os << "fixed.cs_dbm = " << fmt(fixed_action.p_cs_dbm) << "\n";
    os << "sau.learning_rate = " << fmt(trainer.learning_rate) << "\n";
    os << "sau.rms_decay = " << fmt(trainer.rms_decay) << "\n";
    os << "sau.weight_decay = " << fmt(trainer.weight_decay) << "\n";
    os << "sau.batch_size = " << trainer.batch_size << "\n";
    os << "sau.replay_capacity = " << trainer.replay_capacity << "\n";
    os << "sau.n_hidden = " << trainer.n_hidden << "\n";
    os << "grid.mode = " << to_string(grid_mode) << "\n";
    os << "grid.l_cs = " << l_cs << "\n";
    os << "grid.l_tx = " << l_tx << "\n";
    if (!explicit_actions.empty())
        os << "grid.actions = " << actions_to_string(explicit_actions) << "\n";
    os << "phy.idle_slot_s = " << fmt(phy.idle_slot_s) << "\n";
    os << "phy.t_edca_s = " << fmt(phy.t_edca_s) << "\n";
    os << "phy.t_txop_s = " << fmt(phy.t_txop_s) << "\n";
    os << "phy.noise_dbm = " << fmt(phy.noise_dbm) << "\n";
    os << "phy.theta = " << fmt(phy.theta) << "\n";
    os << "phy.ref_loss_db = " << fmt(phy.ref_loss_db) << "\n";
    os << "phy.bandwidth_hz = " << fmt(phy.bandwidth_hz) << "\n";
    os << "phy.step_s = " << fmt(phy.step_s) << "\n";
    os << "phy.collision_floor_dbm = " << fmt(phy.collision_floor_dbm) << "\n";
    os << "phy.collision_cost = " << fmt(phy.collision_cost) << "\n";
    os << "reward.omega = " << fmt(omega) << "\n";
    os << "reward.a1 = " << fmt(a1) << "\n";
    os << "reward.a2 = " << fmt(a2) << "\n";
    os << "bounds.tx_min_dbm = " << fmt(bounds.tx_min_dbm) << "\n";
    os << "bounds.tx_max_dbm = " << fmt(bounds.tx_max_dbm) << "\n";
    os << "bounds.cs_min_dbm = " << fmt(bounds.cs_min_dbm) << "\n";
    os << "bounds.cs_max_dbm = " << fmt(bounds.cs_max_dbm) << "\n";
    os << "run.horizon = " << horizon << "\n";
    os << "transfer.enabled = " << (transfer.enabled ? 1 : 0) << "\n";
    if (transfer.enabled) {
        os << "transfer.strategy = " << to_string(transfer.strategy.kind) << "\n";
        if (!transfer.strategy.layers.empty()) {
            os << "transfer.layers = ";
            for (std::size_t i = 0; i < transfer.strategy.layers.size(); ++i)
                os << (i ? "," : "") << transfer.strategy.layers[i];
            os << "\n";
        }
        os << "transfer.events = ";
        for (std::size_t i = 0; i < transfer.event_times_s.size(); ++i)
            os << (i ? "," : "") << fmt(transfer.event_times_s[i]);
        os << "\n";
    }
    return os.str();
}

std::string ExperimentConfig::scenario_fingerprint() const {
    std::ostringstream os;
    os << topology.n_aps << "|" << topology.n_stations << "|" << fmt(topology.arena_w) << "|"
       << fmt(topology.arena_h) << "|" << fmt(topology.min_ap_separation_m) << "|"
       << fmt(topology.station_p_tx_dbm) << "|" << fmt(topology.relocation_radius_m) << "|"
       << fmt(offered_gbps) << "|" << schedule_to_string(schedule) << "|"
       << fmt(phy.noise_dbm) << "|" << fmt(phy.theta) << "|" << fmt(phy.ref_loss_db) << "|"
       << fmt(phy.bandwidth_hz) << "|" << fmt(phy.step_s) << "|" << fmt(omega) << "|"
       << fmt(a1) << "|" << fmt(a2) << "|" << horizon;
    return os.str();
}

} // namespace srsim
