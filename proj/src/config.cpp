#include "animarl/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "animarl/errors.hpp"

namespace animarl {

int WorldConfig::max_steps() const {
    return static_cast<int>(std::ceil(time_limit / dt - 1e-9));
}

void WorldConfig::validate() const {
    if (!(dt > 0)) throw ContractError("WorldConfig: dt must be > 0");
    if (!(time_limit > 0)) throw ContractError("WorldConfig: time_limit must be > 0");
    if (!(boundary_half_width > arena_half_width))
        throw ContractError("WorldConfig: boundary_half_width must exceed arena_half_width");
    if (!(agent_diameter > 0)) throw ContractError("WorldConfig: agent_diameter must be > 0");
    if (!(chaser_mobility_scale > 0))
        throw ContractError("WorldConfig: chaser_mobility_scale must be > 0");
    if (n_chasers < 1 || n_evaders < 1)
        throw ContractError("WorldConfig: need at least one chaser and one evader");
}

void Schedule::validate() const {
    if (!(0.0 <= eps_finish && eps_finish <= eps_start && eps_start <= 1.0))
        throw ContractError("Schedule: need 0 <= eps_finish <= eps_start <= 1");
    if (decay_steps <= 0) throw ContractError("Schedule: decay_steps must be positive");
    if (total_steps < 0) throw ContractError("Schedule: total_steps must be >= 0");
    if (target_sync_interval <= 0) throw ContractError("Schedule: target_sync_interval must be positive");
    if (!(learning_rate > 0)) throw ContractError("Schedule: learning_rate must be positive");
}

double Schedule::epsilon_at(long step) const {
    if (step >= decay_steps) return eps_finish;
    double frac = static_cast<double>(step) / static_cast<double>(decay_steps);
    return eps_start + (eps_finish - eps_start) * frac;
}

void TrainConfig::validate() const {
    schedule.validate();
    if (lambda1 < 0 || lambda2_offline < 0 || lambda2_online < 0 || lambda3_offline < 0 ||
        lambda3_online < 0 || alpha_offline < 0 || alpha_online < 0)
        throw ContractError("TrainConfig: loss weights must be >= 0");
    if (!(gamma > 0 && gamma <= 1)) throw ContractError("TrainConfig: gamma must be in (0,1]");
    if (batch_size <= 0) throw ContractError("TrainConfig: batch_size must be positive");
    if (replay_capacity < batch_size) throw ContractError("TrainConfig: replay capacity below batch size");
    if (offline_epochs < 0) throw ContractError("TrainConfig: offline_epochs must be >= 0");
}

void RunConfig::validate() const {
    world.validate();
    train.validate();
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double get_double(const KeyValueMap& kv, const std::string& key, double def) {
    auto it = kv.find(key);
    if (it == kv.end()) return def;
    try {
        std::size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw FormatError("config: key '" + key + "' has non-numeric value '" + it->second + "'");
    }
}

long get_long(const KeyValueMap& kv, const std::string& key, long def) {
    auto it = kv.find(key);
    if (it == kv.end()) return def;
    try {
        std::size_t pos = 0;
        long v = std::stol(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw FormatError("config: key '" + key + "' has non-integer value '" + it->second + "'");
    }
}

std::uint64_t get_u64(const KeyValueMap& kv, const std::string& key, std::uint64_t def) {
    auto it = kv.find(key);
    if (it == kv.end()) return def;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw FormatError("config: key '" + key + "' has non-integer value '" + it->second + "'");
    }
}

}  // namespace

KeyValueMap parse_key_value_text(std::istream& in) {
    KeyValueMap kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw FormatError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (key.empty())
            throw FormatError("config line " + std::to_string(lineno) + ": empty key");
        kv[key] = val;
    }
    return kv;
}

KeyValueMap load_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    return parse_key_value_text(in);
}

RunConfig run_config_from_map(const KeyValueMap& kv) {
    RunConfig cfg;
    WorldConfig& w = cfg.world;
    w.arena_half_width = get_double(kv, "arena_half_width", w.arena_half_width);
    w.boundary_half_width = get_double(kv, "boundary_half_width", w.boundary_half_width);
    w.dt = get_double(kv, "dt", w.dt);
    w.time_limit = get_double(kv, "time_limit", w.time_limit);
    w.agent_diameter = get_double(kv, "agent_diameter", w.agent_diameter);
    w.n_chasers = static_cast<int>(get_long(kv, "n_chasers", w.n_chasers));
    w.n_evaders = static_cast<int>(get_long(kv, "n_evaders", w.n_evaders));
    w.chaser_mobility_scale = get_double(kv, "chaser_mobility_scale", w.chaser_mobility_scale);
    w.boundary_penalty = get_double(kv, "boundary_penalty", w.boundary_penalty);
    w.contact_reward = get_double(kv, "contact_reward", w.contact_reward);
    w.rng_seed = get_u64(kv, "rng_seed", w.rng_seed);
    w.chaser_d = get_double(kv, "chaser_d", w.chaser_d);
    w.chaser_u = get_double(kv, "chaser_u", w.chaser_u);
    w.evader_d = get_double(kv, "evader_d", w.evader_d);
    w.evader_u = get_double(kv, "evader_u", w.evader_u);

    TrainConfig& t = cfg.train;
    Schedule& s = t.schedule;
    s.eps_start = get_double(kv, "eps_start", s.eps_start);
    s.eps_finish = get_double(kv, "eps_finish", s.eps_finish);
    s.decay_steps = get_long(kv, "decay_steps", s.decay_steps);
    s.eps_test = get_double(kv, "eps_test", s.eps_test);
    s.total_steps = get_long(kv, "total_steps", s.total_steps);
    s.target_sync_interval = get_long(kv, "target_sync_interval", s.target_sync_interval);
    s.learning_rate = get_double(kv, "learning_rate", s.learning_rate);

    t.lambda1 = get_double(kv, "lambda1", t.lambda1);
    t.lambda2_offline = get_double(kv, "lambda2_offline", t.lambda2_offline);
    t.lambda2_online = get_double(kv, "lambda2_online", t.lambda2_online);
    t.lambda3_offline = get_double(kv, "lambda3_offline", t.lambda3_offline);
    t.lambda3_online = get_double(kv, "lambda3_online", t.lambda3_online);
    t.alpha_offline = get_double(kv, "alpha_offline", t.alpha_offline);
    t.alpha_online = get_double(kv, "alpha_online", t.alpha_online);
    t.gamma = get_double(kv, "gamma", t.gamma);
    t.lr_offline = get_double(kv, "lr_offline", t.lr_offline);
    t.lr_online = get_double(kv, "lr_online", t.lr_online);
    t.lr_online_scratch = get_double(kv, "lr_online_scratch", t.lr_online_scratch);
    t.lr_supervised = get_double(kv, "lr_supervised", t.lr_supervised);
    t.offline_epochs = static_cast<int>(get_long(kv, "offline_epochs", t.offline_epochs));
    t.replay_capacity = get_long(kv, "replay_capacity", t.replay_capacity);
    t.batch_size = static_cast<int>(get_long(kv, "batch_size", t.batch_size));
    t.per_alpha = get_double(kv, "per_alpha", t.per_alpha);
    t.per_beta_start = get_double(kv, "per_beta_start", t.per_beta_start);
    t.per_beta_end = get_double(kv, "per_beta_end", t.per_beta_end);
    t.warmup_steps = get_long(kv, "warmup_steps", t.warmup_steps);
    t.eval_interval = get_long(kv, "eval_interval", t.eval_interval);
    t.eval_episodes = static_cast<int>(get_long(kv, "eval_episodes", t.eval_episodes));
    t.anchor_distance_warn = get_double(kv, "anchor_distance_warn", t.anchor_distance_warn);

    cfg.validate();
    return cfg;
}

KeyValueMap run_config_to_map(const RunConfig& cfg) {
    KeyValueMap kv;
    const WorldConfig& w = cfg.world;
    kv["arena_half_width"] = format_double(w.arena_half_width);
    kv["boundary_half_width"] = format_double(w.boundary_half_width);
    kv["dt"] = format_double(w.dt);
    kv["time_limit"] = format_double(w.time_limit);
    kv["agent_diameter"] = format_double(w.agent_diameter);
    kv["n_chasers"] = std::to_string(w.n_chasers);
    kv["n_evaders"] = std::to_string(w.n_evaders);
    kv["chaser_mobility_scale"] = format_double(w.chaser_mobility_scale);
    kv["boundary_penalty"] = format_double(w.boundary_penalty);
    kv["contact_reward"] = format_double(w.contact_reward);
    kv["rng_seed"] = std::to_string(w.rng_seed);
    kv["chaser_d"] = format_double(w.chaser_d);
    kv["chaser_u"] = format_double(w.chaser_u);
    kv["evader_d"] = format_double(w.evader_d);
    kv["evader_u"] = format_double(w.evader_u);

    const TrainConfig& t = cfg.train;
    const Schedule& s = t.schedule;
    kv["eps_start"] = format_double(s.eps_start);
    kv["eps_finish"] = format_double(s.eps_finish);
    kv["decay_steps"] = std::to_string(s.decay_steps);
    kv["eps_test"] = format_double(s.eps_test);
    kv["total_steps"] = std::to_string(s.total_steps);
    kv["target_sync_interval"] = std::to_string(s.target_sync_interval);
    kv["learning_rate"] = format_double(s.learning_rate);
    kv["lambda1"] = format_double(t.lambda1);
    kv["lambda2_offline"] = format_double(t.lambda2_offline);
    kv["lambda2_online"] = format_double(t.lambda2_online);
    kv["lambda3_offline"] = format_double(t.lambda3_offline);
    kv["lambda3_online"] = format_double(t.lambda3_online);
    kv["alpha_offline"] = format_double(t.alpha_offline);
    kv["alpha_online"] = format_double(t.alpha_online);
    kv["gamma"] = format_double(t.gamma);
    kv["lr_offline"] = format_double(t.lr_offline);
    kv["lr_online"] = format_double(t.lr_online);
    kv["lr_online_scratch"] = format_double(t.lr_online_scratch);
    kv["lr_supervised"] = format_double(t.lr_supervised);
    kv["offline_epochs"] = std::to_string(t.offline_epochs);
    kv["replay_capacity"] = std::to_string(t.replay_capacity);
    kv["batch_size"] = std::to_string(t.batch_size);
    kv["per_alpha"] = format_double(t.per_alpha);
    kv["per_beta_start"] = format_double(t.per_beta_start);
    kv["per_beta_end"] = format_double(t.per_beta_end);
    kv["warmup_steps"] = std::to_string(t.warmup_steps);
    kv["eval_interval"] = std::to_string(t.eval_interval);
    kv["eval_episodes"] = std::to_string(t.eval_episodes);
    kv["anchor_distance_warn"] = format_double(t.anchor_distance_warn);
    return kv;
}

RunConfig load_run_config(const std::string& path) {
    return run_config_from_map(load_key_value_file(path));
}

void save_run_config(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write config file: " + path);
    out << "# animarl run config\n";
    for (const auto& [k, v] : run_config_to_map(cfg)) out << k << " = " << v << "\n";
    if (!out) throw IoError("failed writing config file: " + path);
}

}  // namespace animarl
