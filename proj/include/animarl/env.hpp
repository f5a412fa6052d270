#ifndef ANIMARL_ENV_HPP
#define ANIMARL_ENV_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "animarl/config.hpp"
#include "animarl/geometry.hpp"

namespace animarl {

constexpr int kNumActions = 13;  // no-op plus 12 directions at 30 degree spacing
constexpr double kRestSpeed = 1e-8;

enum class Role { Chaser, Evader };
enum class TerminationCause { None, Contact, Timeout, Boundary };

struct AgentState {
    Vec2 position;
    Vec2 velocity;
    Role role = Role::Chaser;
    bool alive = true;
};

struct StepOutcome {
    std::vector<AgentState> next_states;
    std::vector<double> rewards;
    bool terminated = false;
    TerminationCause cause = TerminationCause::None;
    Role winner = Role::Evader;  // meaningful only when terminated
};

// Minimal dynamics parameters of Eq-style velocity transitions.
struct Dynamics {
    double d = 0.25;  // damping in [0,1]
    double u = 3.0;   // input amplitude, length/s^2
};

// Local-frame unit control directions; index 0 is no acceleration.
const std::array<Vec2, kNumActions>& action_directions();

// Heading convention: normalized velocity, or the world x-axis at rest.
Vec2 heading_of(const Vec2& velocity);

// v' = (1-d) v + u a dt with a rotated from the local frame by `heading`.
Vec2 velocity_transition(const Vec2& v, int action_index, const Dynamics& params,
                         const Vec2& heading, double dt);

std::vector<AgentState> reset(const WorldConfig& config, std::uint64_t seed);

StepOutcome step(const std::vector<AgentState>& states, const std::vector<int>& joint_action,
                 const WorldConfig& config, double t);

// Own absolute position and velocity, relative position/velocity of every
// other agent in index order, then the binary condition flag.
std::vector<double> observe(const std::vector<AgentState>& states, int agent_index,
                            int condition_flag);

int observation_dim(int n_agents);

Dynamics dynamics_for(const WorldConfig& config, Role role);

// Stateful wrapper owning one episode at a time.
class Environment {
public:
    explicit Environment(const WorldConfig& config);

    const std::vector<AgentState>& reset(std::uint64_t seed);
    // Starts an episode from externally supplied states (velocities kept).
    const std::vector<AgentState>& reset_to(const std::vector<AgentState>& states);
    StepOutcome step(const std::vector<int>& joint_action);

    const WorldConfig& config() const { return config_; }
    const std::vector<AgentState>& states() const { return states_; }
    int step_index() const { return step_index_; }
    double time() const { return step_index_ * config_.dt; }
    bool done() const { return done_; }
    TerminationCause cause() const { return cause_; }
    Role winner() const { return winner_; }

private:
    WorldConfig config_;
    std::vector<AgentState> states_;
    int step_index_ = 0;
    bool done_ = false;
    TerminationCause cause_ = TerminationCause::None;
    Role winner_ = Role::Evader;
};

}  // namespace animarl

#endif
