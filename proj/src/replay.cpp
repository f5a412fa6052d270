#include "animarl/replay.hpp"

#include <algorithm>
#include <cmath>

#include "animarl/errors.hpp"

namespace animarl {

ReplayBuffer::ReplayBuffer(std::size_t capacity, double per_alpha, std::uint64_t seed)
    : capacity_(capacity), per_alpha_(per_alpha), rng_(seed) {
    if (capacity == 0) throw ContractError("ReplayBuffer: capacity must be positive");
    if (per_alpha < 0) throw ContractError("ReplayBuffer: alpha must be >= 0");
    while (tree_leaves_ < capacity_) tree_leaves_ *= 2;
    tree_.assign(2 * tree_leaves_, 0.0);
}

void ReplayBuffer::tree_set(std::size_t leaf, double mass) {
    std::size_t i = tree_leaves_ + leaf;
    tree_[i] = mass;
    for (i /= 2; i >= 1; i /= 2) tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
}

std::size_t ReplayBuffer::tree_find(double mass) const {
    std::size_t i = 1;
    while (i < tree_leaves_) {
        if (mass < tree_[2 * i] || tree_[2 * i + 1] <= 0.0) {
            i = 2 * i;
        } else {
            mass -= tree_[2 * i];
            i = 2 * i + 1;
        }
    }
    return i - tree_leaves_;
}

std::size_t ReplayBuffer::insert_at(std::size_t slot, Transition t) {
    if (slot == items_.size()) {
        items_.push_back(std::move(t));
        priorities_.push_back(max_priority_);
    } else {
        items_[slot] = std::move(t);
        priorities_[slot] = max_priority_;
    }
    tree_set(slot, std::pow(priorities_[slot], per_alpha_));
    return slot;
}

std::size_t ReplayBuffer::push_demo(Transition t) {
    if (online_started_)
        throw ContractError("ReplayBuffer: demo items must be inserted before online items");
    if (demo_count_ >= capacity_)
        throw ContractError("ReplayBuffer: demo items exceed capacity");
    std::size_t slot = demo_count_++;
    ring_cursor_ = demo_count_;
    return insert_at(slot, std::move(t));
}

std::size_t ReplayBuffer::push(Transition t) {
    online_started_ = true;
    if (demo_count_ >= capacity_)
        throw ContractError("ReplayBuffer: no room for online items beside pinned demos");
    std::size_t slot;
    if (items_.size() < capacity_) {
        slot = items_.size();
    } else {
        if (ring_cursor_ < demo_count_ || ring_cursor_ >= capacity_) ring_cursor_ = demo_count_;
        slot = ring_cursor_;
        ring_cursor_ = ring_cursor_ + 1 >= capacity_ ? demo_count_ : ring_cursor_ + 1;
    }
    return insert_at(slot, std::move(t));
}

ReplayBuffer::Sample ReplayBuffer::sample(std::size_t batch_size, double beta) {
    if (items_.empty()) throw ContractError("ReplayBuffer::sample: empty buffer");
    if (batch_size > items_.size())
        throw ContractError("ReplayBuffer::sample: batch larger than buffer");
    double total = tree_total();
    if (!(total > 0)) throw ContractError("ReplayBuffer::sample: zero total priority mass");

    Sample s;
    s.indices.resize(batch_size);
    s.weights.resize(batch_size);
    const double n = static_cast<double>(items_.size());
    double max_w = 0.0;
    for (std::size_t b = 0; b < batch_size; ++b) {
        std::size_t idx = tree_find(rng_.uniform() * total);
        idx = std::min(idx, items_.size() - 1);
        s.indices[b] = idx;
        double p = tree_[tree_leaves_ + idx] / total;
        double w = std::pow(n * p, -beta);
        s.weights[b] = w;
        max_w = std::max(max_w, w);
    }
    if (max_w > 0)
        for (double& w : s.weights) w /= max_w;
    return s;
}

void ReplayBuffer::update_priorities(const std::vector<std::size_t>& indices,
                                     const std::vector<double>& td_errors) {
    if (indices.size() != td_errors.size())
        throw ContractError("update_priorities: size mismatch");
    for (std::size_t i = 0; i < indices.size(); ++i)
        set_priority(indices[i], std::abs(td_errors[i]) + kPriorityEpsilon);
}

void ReplayBuffer::set_priority(std::size_t index, double priority) {
    if (index >= items_.size()) throw ContractError("set_priority: index out of range");
    if (!(priority > 0)) throw ContractError("set_priority: priority must be positive");
    priorities_[index] = priority;
    max_priority_ = std::max(max_priority_, priority);
    tree_set(index, std::pow(priority, per_alpha_));
}

}  // namespace animarl
