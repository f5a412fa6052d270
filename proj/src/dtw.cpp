#include "animarl/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "animarl/episode.hpp"
#include "animarl/errors.hpp"

namespace animarl {

namespace {

double local_cost(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ContractError("dtw: feature dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

DtwResult dtw_full(const std::vector<std::vector<double>>& a,
                   const std::vector<std::vector<double>>& b) {
    if (a.empty() || b.empty()) throw ContractError("dtw_full: empty sequence");
    const std::size_t n = a.size(), m = b.size();
    DtwResult res;
    res.matrix.assign(n, std::vector<double>(m, 0.0));
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t j = 0; j < m; ++j) {
            double c = local_cost(a[t], b[j]);
            if (t == 0 && j == 0) {
                res.matrix[t][j] = c;
            } else if (t == 0) {
                res.matrix[t][j] = c + res.matrix[t][j - 1];
            } else if (j == 0) {
                res.matrix[t][j] = c + res.matrix[t - 1][j];
            } else {
                res.matrix[t][j] = c + std::min({res.matrix[t - 1][j], res.matrix[t][j - 1],
                                                 res.matrix[t - 1][j - 1]});
            }
        }
    }
    res.distance = res.matrix[n - 1][m - 1];
    return res;
}

double dtw_distance(const std::vector<std::vector<double>>& a,
                    const std::vector<std::vector<double>>& b) {
    return dtw_full(a, b).distance;
}

WarpState::WarpState(std::vector<std::vector<double>> expert_sequence)
    : expert_(std::move(expert_sequence)) {
    if (expert_.empty()) throw ContractError("WarpState: empty expert sequence");
    row_.assign(expert_.size(), 0.0);
}

double WarpState::append_step(const std::vector<double>& state) {
    const std::size_t m = expert_.size();
    std::vector<double> next(m, 0.0);
    if (t_ == 0) {
        next[0] = local_cost(state, expert_[0]);
        for (std::size_t j = 1; j < m; ++j) next[j] = local_cost(state, expert_[j]) + next[j - 1];
    } else {
        next[0] = local_cost(state, expert_[0]) + row_[0];
        for (std::size_t j = 1; j < m; ++j) {
            next[j] = local_cost(state, expert_[j]) +
                      std::min({row_[j], next[j - 1], row_[j - 1]});
        }
    }
    row_ = std::move(next);
    ++t_;
    double best = std::numeric_limits<double>::infinity();
    aligned_ = 0;
    for (std::size_t j = 0; j < m; ++j) {
        if (row_[j] < best) {
            best = row_[j];
            aligned_ = j;
        }
    }
    return best;
}

double mix_reward(double touch, double dtw_pseudo, double alpha) {
    if (alpha < 0) throw ContractError("mix_reward: alpha must be >= 0");
    return touch - alpha * dtw_pseudo;
}

const Episode* match_expert(const std::vector<double>& episode_start,
                            const std::vector<const Episode*>& demo_pool) {
    if (demo_pool.empty()) throw ContractError("match_expert: empty demonstration pool");
    const Episode* best = nullptr;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const Episode* e : demo_pool) {
        std::vector<double> s = e->start_position_features();
        if (s.size() != episode_start.size())
            throw ContractError("match_expert: start feature dimension mismatch");
        double d2 = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            double d = s[i] - episode_start[i];
            d2 += d * d;
        }
        if (d2 < best_d2 || (d2 == best_d2 && best != nullptr && e->episode_id < best->episode_id)) {
            best_d2 = d2;
            best = e;
        }
    }
    return best;
}

const Episode& match_expert(const std::vector<double>& episode_start,
                            const std::vector<Episode>& demo_pool) {
    std::vector<const Episode*> ptrs;
    ptrs.reserve(demo_pool.size());
    for (const Episode& e : demo_pool) ptrs.push_back(&e);
    return *match_expert(episode_start, ptrs);
}

}  // namespace animarl
