#include "animarl/demo_gen.hpp"

#include <cmath>
#include <limits>

#include "animarl/errors.hpp"
#include "animarl/rng.hpp"

namespace animarl {

namespace {

Vec2 rotate(const Vec2& v, double angle) {
    double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Vec2 normalized_or_zero(const Vec2& v) {
    double n = v.norm();
    if (n < 1e-12) return {0.0, 0.0};
    return {v.x / n, v.y / n};
}

int nearest_agent(const std::vector<AgentState>& states, int self_index, Role role) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < states.size(); ++j) {
        if (static_cast<int>(j) == self_index || states[j].role != role) continue;
        double d = distance(states[j].position, states[self_index].position);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(j);
        }
    }
    return best;
}

}  // namespace

int steer_action(const AgentState& self, const Vec2& desired_dir) {
    Vec2 dir = normalized_or_zero(desired_dir);
    if (dir.x == 0.0 && dir.y == 0.0) return 0;
    Vec2 local = rotate_from_frame(heading_of(self.velocity), dir);
    const auto& dirs = action_directions();
    int best = 1;
    double best_dot = dirs[1].dot(local);
    for (int k = 2; k < kNumActions; ++k) {
        double dk = dirs[k].dot(local);
        if (dk > best_dot + 1e-12) {
            best_dot = dk;
            best = k;
        }
    }
    return best;
}

int scripted_chaser_action(const std::vector<AgentState>& states, int self_index,
                           const WorldConfig& config, int condition, int chaser_ordinal) {
    const AgentState& self = states[self_index];
    int target = nearest_agent(states, self_index, Role::Evader);
    if (target < 0) return 0;
    const AgentState& evader = states[target];

    Dynamics dyn = dynamics_for(config, Role::Chaser);
    double top_speed = dyn.u * config.dt / std::max(dyn.d, 1e-6);
    double dist = distance(evader.position, self.position);
    double lead = std::min(dist / std::max(top_speed, 1e-6), 0.5);
    Vec2 aim = evader.position + evader.velocity * lead;

    if (condition == 1) {
        double side = chaser_ordinal % 2 == 0 ? 1.0 : -1.0;
        Vec2 approach = rotate(heading_of(evader.velocity), side * M_PI / 4.0);
        double standoff = std::min(0.35, 0.6 * dist);
        aim += approach * standoff;
    }
    return steer_action(self, aim - self.position);
}

int scripted_evader_action(const std::vector<AgentState>& states, int self_index,
                           const WorldConfig& config) {
    const AgentState& self = states[self_index];
    int threat = nearest_agent(states, self_index, Role::Chaser);
    if (threat < 0) return 0;

    Vec2 flee = normalized_or_zero(self.position - states[threat].position);
    Vec2 avoid{0.0, 0.0};
    double margin = 0.8 * config.arena_half_width;
    double gain = 10.0;
    if (self.position.x > margin) avoid.x -= gain * (self.position.x - margin);
    if (self.position.x < -margin) avoid.x += gain * (-margin - self.position.x);
    if (self.position.y > margin) avoid.y -= gain * (self.position.y - margin);
    if (self.position.y < -margin) avoid.y += gain * (-margin - self.position.y);

    Vec2 desired = flee + avoid;
    if (desired.norm() < 0.3) {
        // Cornered: slide along the tangent that points back toward the arena.
        Vec2 tangent{-flee.y, flee.x};
        if (tangent.dot(self.position) > 0) tangent = tangent * -1.0;
        desired = tangent;
    }
    return steer_action(self, desired);
}

std::vector<int> scripted_joint_action(const std::vector<AgentState>& states,
                                       const WorldConfig& config, int condition) {
    std::vector<int> actions(states.size(), 0);
    int chaser_ordinal = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].role == Role::Chaser) {
            actions[i] = scripted_chaser_action(states, static_cast<int>(i), config, condition,
                                                chaser_ordinal++);
        } else {
            actions[i] = scripted_evader_action(states, static_cast<int>(i), config);
        }
    }
    return actions;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 0x632be59bd9b4e019ULL));
    return splitmix64(state);
}

std::vector<Episode> generate_demos(const WorldConfig& config, int n_episodes, int condition,
                                    std::uint64_t seed, long id_start) {
    if (n_episodes < 0) throw ContractError("generate_demos: n_episodes must be >= 0");
    if (condition != 0 && condition != 1)
        throw ContractError("generate_demos: condition must be 0 or 1");
    config.validate();

    std::vector<Episode> episodes;
    episodes.reserve(n_episodes);
    Environment env(config);
    for (int ep = 0; ep < n_episodes; ++ep) {
        env.reset(derive_seed(seed, static_cast<std::uint64_t>(ep)));
        Episode e;
        e.episode_id = id_start + ep;
        e.condition = condition;
        e.dt = config.dt;
        e.agents.resize(config.n_agents());
        for (int i = 0; i < config.n_agents(); ++i) {
            e.agents[i].role = env.states()[i].role;
            e.agents[i].positions.push_back(env.states()[i].position);
            e.agents[i].velocities.push_back(env.states()[i].velocity);
        }
        while (!env.done()) {
            std::vector<int> actions = scripted_joint_action(env.states(), config, condition);
            env.step(actions);
            for (int i = 0; i < config.n_agents(); ++i) {
                e.agents[i].actions.push_back(actions[i]);
                e.agents[i].positions.push_back(env.states()[i].position);
                e.agents[i].velocities.push_back(env.states()[i].velocity);
            }
        }
        e.outcome = env.cause();
        e.winner = env.winner();
        e.validate();
        episodes.push_back(std::move(e));
    }
    return episodes;
}

}  // namespace animarl
