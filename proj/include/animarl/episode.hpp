#ifndef ANIMARL_EPISODE_HPP
#define ANIMARL_EPISODE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "animarl/env.hpp"
#include "animarl/geometry.hpp"
#include "animarl/locomotion.hpp"

namespace animarl {

struct AgentTrajectory {
    Role role = Role::Chaser;
    std::vector<Vec2> positions;
    std::vector<Vec2> velocities;
    std::vector<int> actions;  // size length()-1 when labeled, empty otherwise
};

// Universal trajectory record: time-stamped per-agent positions/velocities
// with optional action labels, condition flag, and terminal outcome.
struct Episode {
    long episode_id = 0;
    int condition = 0;  // binary flag, 0 or 1
    double dt = 0.1;
    std::vector<AgentTrajectory> agents;
    TerminationCause outcome = TerminationCause::Timeout;
    Role winner = Role::Evader;

    std::size_t length() const { return agents.empty() ? 0 : agents[0].positions.size(); }
    double duration() const { return length() < 2 ? 0.0 : (length() - 1) * dt; }

    // Flattened all-agent positions, one 2K-vector per time step.
    std::vector<std::vector<double>> position_features() const;
    std::vector<double> start_position_features() const;

    std::vector<AgentState> state_at(std::size_t t) const;

    void validate() const;
};

std::string to_string(TerminationCause cause);
TerminationCause cause_from_string(const std::string& s);
std::string to_string(Role role);
Role role_from_string(const std::string& s);

// --- dataset files: one JSON object per line, schema header on line 1 ---

void write_dataset(const std::vector<Episode>& episodes, const std::string& path);
std::vector<Episode> read_dataset(const std::string& path);

// Stride decimation with dt rescaling; drops per-step action labels.
Episode downsample(const Episode& episode, int stride);

// Velocity tracks of all agents with the given role, one track per
// agent-episode pair.
TrajectoryBatch velocity_batch(const std::vector<Episode>& episodes, Role role);

// --- train/validation/test splitting ---

struct SplitCounts {
    int train = 0;
    int validation = 0;
    int test = 0;
};

struct StageSplit {
    std::vector<long> train_ids;
    std::vector<long> validation_ids;
    std::vector<long> test_ids;
};

struct SplitSpec {
    StageSplit estimation;
    StageSplit offline;
    StageSplit online;

    // Throws ContractError if any stage's test ids intersect its train ids.
    void validate_isolation() const;
};

// Deterministic per-condition stratified split.
StageSplit make_splits(const std::vector<Episode>& episodes, const SplitCounts& counts,
                       std::uint64_t seed);

// Pipeline default: estimation and offline share one 400/50/50 split
// (200/25/25 per condition); online fine-tuning draws 50 train episodes from
// the offline validation+test pool and 10 test episodes from the offline test
// set.
SplitSpec default_split_spec(const std::vector<Episode>& episodes, std::uint64_t seed);

std::vector<Episode> select_episodes(const std::vector<Episode>& episodes,
                                     const std::vector<long>& ids);

}  // namespace animarl

#endif
