#ifndef ANIMARL_CONFIG_HPP
#define ANIMARL_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

namespace animarl {

// Arena geometry, timing, and reward constants of the chase-escape world.
struct WorldConfig {
    double arena_half_width = 1.0;
    double boundary_half_width = 1.1;
    double dt = 0.1;                    // seconds per step
    double time_limit = 14.8;           // seconds
    double agent_diameter = 0.1;
    int n_chasers = 2;
    int n_evaders = 1;
    double chaser_mobility_scale = 1.2;
    double boundary_penalty = -10.0;
    double contact_reward = 1.0;
    std::uint64_t rng_seed = 0;

    // Base locomotion parameters per role. The chaser input amplitude is
    // multiplied by chaser_mobility_scale at simulation time.
    double chaser_d = 0.25;
    double chaser_u = 3.0;
    double evader_d = 0.25;
    double evader_u = 3.0;

    int n_agents() const { return n_chasers + n_evaders; }
    int max_steps() const;

    // Throws ContractError if any invariant is violated.
    void validate() const;
};

// Exploration schedule and step budget for one training run.
struct Schedule {
    double eps_start = 0.1;
    double eps_finish = 0.1;
    long decay_steps = 50000;
    double eps_test = 0.1;
    long total_steps = 1005000;
    long target_sync_interval = 2000;
    double learning_rate = 1e-6;

    void validate() const;
    // Piecewise-linear epsilon: linear over the first decay_steps, then flat.
    double epsilon_at(long step) const;
};

// Every knob of the training pipeline; serialized into each run directory.
struct TrainConfig {
    Schedule schedule;

    double lambda1 = 1e-5;           // l2 weight
    double lambda2_offline = 10.0;   // treatment weight (DQCIL)
    double lambda2_online = 1.0;
    double lambda3_offline = 50.0;   // action-supervision weight (DQAAS)
    double lambda3_online = 10.0;
    double alpha_offline = 10.0;     // DTW reward mixing weight
    double alpha_online = 1.0;
    double gamma = 0.99;

    double lr_offline = 1e-6;
    double lr_online = 1e-6;             // fine-tuning after pretraining
    double lr_online_scratch = 1e-6;     // online from scratch
    double lr_supervised = 1e-3;         // BC and the supervised part of DQAAS

    int offline_epochs = 30;
    long replay_capacity = 100000;
    int batch_size = 32;
    double per_alpha = 0.6;
    double per_beta_start = 0.4;
    double per_beta_end = 1.0;
    long warmup_steps = 1000;

    long eval_interval = 25000;
    int eval_episodes = 5;
    double anchor_distance_warn = 0.5;  // flag episodes whose demo anchor is this far

    void validate() const;
};

struct RunConfig {
    WorldConfig world;
    TrainConfig train;

    void validate() const;
};

// --- plain-text key=value serialization ---

using KeyValueMap = std::map<std::string, std::string>;

KeyValueMap parse_key_value_text(std::istream& in);
KeyValueMap load_key_value_file(const std::string& path);

RunConfig run_config_from_map(const KeyValueMap& kv);
KeyValueMap run_config_to_map(const RunConfig& cfg);

RunConfig load_run_config(const std::string& path);
void save_run_config(const RunConfig& cfg, const std::string& path);

std::string format_double(double v);  // lossless decimal round-trip

}  // namespace animarl

#endif
