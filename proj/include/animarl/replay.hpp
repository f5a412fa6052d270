#ifndef ANIMARL_REPLAY_HPP
#define ANIMARL_REPLAY_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "animarl/rng.hpp"

namespace animarl {

// One stored experience; rewards are already shaped.
struct Transition {
    std::vector<double> obs;
    std::vector<double> next_obs;
    std::vector<double> h_prev;
    std::vector<double> h_cur;
    int action = 0;
    double reward = 0.0;
    bool terminal = false;
    int condition = 0;
    long episode_id = 0;
    int step_index = 0;
    int aligned_action = -1;
};

constexpr double kPriorityEpsilon = 1e-3;

// Proportional prioritized replay over a sum tree. Demonstration items are
// pinned: online insertions only ever evict other online items.
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, double per_alpha, std::uint64_t seed);

    // Pinned insertion; must precede online pushes and fit within capacity.
    std::size_t push_demo(Transition t);
    // Ring insertion over the non-demo region.
    std::size_t push(Transition t);

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::size_t demo_count() const { return demo_count_; }
    bool is_demo(std::size_t index) const { return index < demo_count_; }

    const Transition& at(std::size_t index) const { return items_.at(index); }
    Transition& at_mut(std::size_t index) { return items_.at(index); }

    struct Sample {
        std::vector<std::size_t> indices;
        std::vector<double> weights;  // (N P(i))^-beta, normalized by batch max
    };

    Sample sample(std::size_t batch_size, double beta);

    // Sets priority to |td_error| + epsilon.
    void update_priorities(const std::vector<std::size_t>& indices,
                           const std::vector<double>& td_errors);
    void set_priority(std::size_t index, double priority);
    double priority(std::size_t index) const { return priorities_.at(index); }

private:
    std::size_t capacity_;
    double per_alpha_;
    Rng rng_;
    std::vector<Transition> items_;
    std::vector<double> priorities_;
    std::vector<double> tree_;  // binary sum tree over priority^alpha
    std::size_t tree_leaves_ = 1;
    std::size_t demo_count_ = 0;
    std::size_t ring_cursor_ = 0;
    double max_priority_ = 1.0;
    bool online_started_ = false;

    void tree_set(std::size_t leaf, double mass);
    double tree_total() const { return tree_[1]; }
    std::size_t tree_find(double mass) const;
    std::size_t insert_at(std::size_t slot, Transition t);
};

}  // namespace animarl

#endif
