#ifndef ANIMARL_TRAIN_HPP
#define ANIMARL_TRAIN_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "animarl/config.hpp"
#include "animarl/episode.hpp"
#include "animarl/qnet.hpp"
#include "animarl/replay.hpp"

namespace animarl {

enum class Method { DQN, BC, DQAAS, DQDIL, DQCIL };

Method method_from_string(const std::string& s);
std::string to_string(Method m);
bool method_uses_demos(Method m);

// Per-step action source for one agent; rollouts drive one per chaser.
class Policy {
public:
    virtual ~Policy() = default;
    virtual void begin_episode() = 0;
    // eps-greedy decision; always consumes exactly two uniform draws so that
    // paired rollouts stay aligned.
    virtual int act(const std::vector<double>& obs, double eps, Rng& rng) = 0;
};

class QNetPolicy : public Policy {
public:
    explicit QNetPolicy(const QNet& net);
    void begin_episode() override;
    int act(const std::vector<double>& obs, double eps, Rng& rng) override;

private:
    const QNet* net_;
    std::vector<double> hidden_;
};

int greedy_action(const std::vector<double>& q);

// Append-only CSV training log.
class TrainLog {
public:
    TrainLog() = default;
    explicit TrainLog(const std::string& path);
    void row(const std::string& phase, long env_steps, int epoch, double loss_td, double loss_l2,
             double loss_tr, double loss_sup, double eps, double mean_return, double eval_return);
    bool open() const { return !path_.empty(); }

private:
    std::string path_;
};

// Demonstration transitions of one agent, grouped per episode so hidden
// states can be recomputed by replaying each episode from its start.
struct DemoTransitions {
    struct Group {
        std::size_t first = 0;
        std::size_t count = 0;
    };
    std::vector<Transition> items;
    std::vector<Group> groups;
};

// Builds shaped transitions for `agent_index` from labeled demonstrations.
// Rewards are recomputed with the environment rules and mixed with the DTW
// pseudo-penalty against the condition-matched anchor; `aligned_labels`
// additionally records the DTW-aligned expert action for supervision.
DemoTransitions build_demo_transitions(const std::vector<Episode>& demos, int agent_index,
                                       const WorldConfig& cfg, double alpha,
                                       const std::vector<Episode>& anchor_pool,
                                       bool aligned_labels);

void refresh_hidden_states(DemoTransitions& data, const QNet& net);

// Offline phase for one agent: 30 epochs (configurable) of shuffled passes
// over the demonstration transitions with the method's loss. DQN returns the
// freshly initialized network untouched.
QNet pretrain_offline(const std::vector<Episode>& demos, int agent_index, Method method,
                      const RunConfig& cfg, std::uint64_t seed, TrainLog* log = nullptr);

struct RolloutOptions {
    double eps = 0.0;
    int n_episodes = 1;
    int condition = 0;
    std::uint64_t seed = 0;
    const std::vector<Episode>* demo_pool = nullptr;   // evader action source
    const std::vector<Episode>* start_pool = nullptr;  // initial states, cycled
    long id_start = 0;
};

// Runs greedy-with-eps chaser policies against the demonstration-replay
// evader; deterministic given options.
std::vector<Episode> rollout(const std::vector<Policy*>& chaser_policies,
                             const WorldConfig& cfg, const RolloutOptions& opt);

std::vector<Episode> rollout_nets(const std::vector<QNet>& chaser_nets, const WorldConfig& cfg,
                                  const RolloutOptions& opt);

struct TrainOptions {
    Method method = Method::DQDIL;
    bool pretrain = false;
    long online_steps = -1;  // -1 uses schedule.total_steps
    std::uint64_t seed = 0;
    std::string log_path;
};

struct TrainOutcome {
    std::vector<QNet> nets;  // one per chaser
    long env_steps = 0;
    int offline_epochs_run = 0;
    long episodes_run = 0;
    long anchor_warnings = 0;  // episodes whose demo anchor started far away
};

// Full pipeline: optional offline pretraining for every chaser followed by
// online environment training per the method's loss.
TrainOutcome train(const RunConfig& cfg, const TrainOptions& opt,
                   const std::vector<Episode>& demos);

// Fills missing action labels in place via locomotion inference.
void ensure_action_labels(std::vector<Episode>& episodes, const WorldConfig& cfg);

}  // namespace animarl

#endif
