#include "animarl/env.hpp"

#include <cmath>

#include "animarl/errors.hpp"
#include "animarl/rng.hpp"

namespace animarl {

const std::array<Vec2, kNumActions>& action_directions() {
    static const std::array<Vec2, kNumActions> dirs = [] {
        std::array<Vec2, kNumActions> d{};
        d[0] = Vec2{0.0, 0.0};
        for (int k = 1; k < kNumActions; ++k) {
            double angle = (k - 1) * (M_PI / 6.0);
            d[k] = Vec2{std::cos(angle), std::sin(angle)};
        }
        return d;
    }();
    return dirs;
}

Vec2 heading_of(const Vec2& velocity) {
    double speed = velocity.norm();
    if (speed < kRestSpeed) return {1.0, 0.0};
    return {velocity.x / speed, velocity.y / speed};
}

Vec2 velocity_transition(const Vec2& v, int action_index, const Dynamics& params,
                         const Vec2& heading, double dt) {
    if (!v.finite() || !heading.finite())
        throw InvalidStateError("velocity_transition: non-finite input components");
    if (action_index < 0 || action_index >= kNumActions)
        throw ContractError("velocity_transition: action index out of range");
    if (!(dt > 0)) throw ContractError("velocity_transition: dt must be > 0");
    if (!(params.d >= 0.0 && params.d <= 1.0))
        throw ContractError("velocity_transition: damping must lie in [0,1]");
    if (!(params.u >= 0.0)) throw ContractError("velocity_transition: input amplitude must be >= 0");

    Vec2 a = rotate_to_frame(heading, action_directions()[action_index]);
    return v * (1.0 - params.d) + a * (params.u * dt);
}

std::vector<AgentState> reset(const WorldConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(seed);
    std::vector<AgentState> states(config.n_agents());
    for (int i = 0; i < config.n_agents(); ++i) {
        states[i].position = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        states[i].velocity = {0.0, 0.0};
        states[i].role = i < config.n_chasers ? Role::Chaser : Role::Evader;
        states[i].alive = true;
    }
    return states;
}

Dynamics dynamics_for(const WorldConfig& config, Role role) {
    if (role == Role::Chaser)
        return {config.chaser_d, config.chaser_u * config.chaser_mobility_scale};
    return {config.evader_d, config.evader_u};
}

StepOutcome step(const std::vector<AgentState>& states, const std::vector<int>& joint_action,
                 const WorldConfig& config, double t) {
    if (states.size() != static_cast<std::size_t>(config.n_agents()))
        throw ContractError("step: state count does not match config agent count");
    if (joint_action.size() != states.size())
        throw ContractError("step: joint action count does not match agent count");
    if (t > config.time_limit + 1e-9) throw ContractError("step: t beyond time limit");
    for (const auto& s : states)
        if (!s.alive) throw ContractError("step: all agents must be alive");

    StepOutcome out;
    out.next_states = states;
    out.rewards.assign(states.size(), 0.0);

    for (std::size_t i = 0; i < states.size(); ++i) {
        const AgentState& s = states[i];
        Dynamics dyn = dynamics_for(config, s.role);
        Vec2 v2 = velocity_transition(s.velocity, joint_action[i], dyn, heading_of(s.velocity),
                                      config.dt);
        out.next_states[i].velocity = v2;
        out.next_states[i].position = s.position + v2 * config.dt;
    }

    bool contact = false;
    for (std::size_t c = 0; c < states.size(); ++c) {
        if (out.next_states[c].role != Role::Chaser) continue;
        for (std::size_t e = 0; e < states.size(); ++e) {
            if (out.next_states[e].role != Role::Evader) continue;
            if (distance(out.next_states[c].position, out.next_states[e].position) <=
                config.agent_diameter) {
                contact = true;
                out.rewards[c] += config.contact_reward;
            }
        }
    }
    if (contact) {
        out.terminated = true;
        out.cause = TerminationCause::Contact;
        out.winner = Role::Chaser;
        return out;
    }

    bool evader_out = false, chaser_out = false;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const Vec2& p = out.next_states[i].position;
        if (std::abs(p.x) > config.boundary_half_width || std::abs(p.y) > config.boundary_half_width) {
            out.rewards[i] += config.boundary_penalty;
            out.next_states[i].alive = false;
            if (out.next_states[i].role == Role::Evader)
                evader_out = true;
            else
                chaser_out = true;
        }
    }
    if (evader_out || chaser_out) {
        out.terminated = true;
        out.cause = TerminationCause::Boundary;
        out.winner = evader_out ? Role::Chaser : Role::Evader;
        // The evader survived this step unless it was the offender.
        if (!evader_out) {
            for (std::size_t i = 0; i < states.size(); ++i)
                if (out.next_states[i].role == Role::Evader) out.rewards[i] += config.dt;
        }
        return out;
    }

    for (std::size_t i = 0; i < states.size(); ++i)
        if (out.next_states[i].role == Role::Evader) out.rewards[i] += config.dt;

    if (t + config.dt >= config.time_limit - 1e-9) {
        out.terminated = true;
        out.cause = TerminationCause::Timeout;
        out.winner = Role::Evader;
    }
    return out;
}

int observation_dim(int n_agents) { return 4 + 4 * (n_agents - 1) + 1; }

std::vector<double> observe(const std::vector<AgentState>& states, int agent_index,
                            int condition_flag) {
    if (agent_index < 0 || agent_index >= static_cast<int>(states.size()))
        throw ContractError("observe: agent index out of range");
    std::vector<double> obs;
    obs.reserve(observation_dim(static_cast<int>(states.size())));
    const AgentState& self = states[agent_index];
    obs.push_back(self.position.x);
    obs.push_back(self.position.y);
    obs.push_back(self.velocity.x);
    obs.push_back(self.velocity.y);
    for (std::size_t j = 0; j < states.size(); ++j) {
        if (static_cast<int>(j) == agent_index) continue;
        Vec2 dp = states[j].position - self.position;
        Vec2 dv = states[j].velocity - self.velocity;
        obs.push_back(dp.x);
        obs.push_back(dp.y);
        obs.push_back(dv.x);
        obs.push_back(dv.y);
    }
    obs.push_back(static_cast<double>(condition_flag));
    return obs;
}

Environment::Environment(const WorldConfig& config) : config_(config) {
    config_.validate();
}

const std::vector<AgentState>& Environment::reset(std::uint64_t seed) {
    states_ = animarl::reset(config_, seed);
    step_index_ = 0;
    done_ = false;
    cause_ = TerminationCause::None;
    return states_;
}

const std::vector<AgentState>& Environment::reset_to(const std::vector<AgentState>& states) {
    if (states.size() != static_cast<std::size_t>(config_.n_agents()))
        throw ContractError("reset_to: state count does not match config");
    states_ = states;
    for (auto& s : states_) s.alive = true;
    step_index_ = 0;
    done_ = false;
    cause_ = TerminationCause::None;
    return states_;
}

StepOutcome Environment::step(const std::vector<int>& joint_action) {
    if (done_) throw ContractError("Environment::step called on finished episode");
    StepOutcome out = animarl::step(states_, joint_action, config_, time());
    states_ = out.next_states;
    ++step_index_;
    done_ = out.terminated;
    cause_ = out.cause;
    winner_ = out.winner;
    return out;
}

}  // namespace animarl
