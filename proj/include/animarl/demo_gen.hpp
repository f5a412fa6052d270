#ifndef ANIMARL_DEMO_GEN_HPP
#define ANIMARL_DEMO_GEN_HPP

#include <cstdint>
#include <vector>

#include "animarl/config.hpp"
#include "animarl/episode.hpp"

namespace animarl {

// Maps a desired world-frame direction onto the nearest discrete action in
// the agent's local frame; zero direction maps to the no-op action.
int steer_action(const AgentState& self, const Vec2& desired_dir);

// Scripted behaviors used both for demonstration generation and as test
// oracles. Condition 0: chasers pursue the predicted intercept point
// directly. Condition 1: chasers flank, swinging to bearings +-45 degrees
// off the evader's heading before closing, which lengthens their paths.
int scripted_chaser_action(const std::vector<AgentState>& states, int self_index,
                           const WorldConfig& config, int condition, int chaser_ordinal);
int scripted_evader_action(const std::vector<AgentState>& states, int self_index,
                           const WorldConfig& config);

std::vector<int> scripted_joint_action(const std::vector<AgentState>& states,
                                       const WorldConfig& config, int condition);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Scripted chase-escape demonstrations with exact discrete-action dynamics
// and labeled actions/outcomes.
std::vector<Episode> generate_demos(const WorldConfig& config, int n_episodes, int condition,
                                    std::uint64_t seed, long id_start = 0);

}  // namespace animarl

#endif
