#ifndef ANIMARL_DTW_HPP
#define ANIMARL_DTW_HPP

#include <cstddef>
#include <vector>

namespace animarl {

struct Episode;

struct DtwResult {
    std::vector<std::vector<double>> matrix;  // n x m cumulative costs
    double distance = 0.0;                    // matrix[n-1][m-1]
};

// Full dynamic-programming warping matrix with Euclidean local cost.
DtwResult dtw_full(const std::vector<std::vector<double>>& a,
                   const std::vector<std::vector<double>>& b);

double dtw_distance(const std::vector<std::vector<double>>& a,
                    const std::vector<std::vector<double>>& b);

// Incremental row-by-row warping against a fixed expert sequence. Each
// append_step costs O(m) and reproduces the corresponding dtw_full row.
class WarpState {
public:
    explicit WarpState(std::vector<std::vector<double>> expert_sequence);

    // Appends the simulated state for the next step and returns the
    // pseudo-penalty: the minimum cumulative cost over the new row.
    double append_step(const std::vector<double>& state);

    std::size_t steps() const { return t_; }
    std::size_t expert_length() const { return expert_.size(); }
    const std::vector<double>& current_row() const { return row_; }
    // Expert index best aligned with the latest simulated step.
    std::size_t aligned_index() const { return aligned_; }

private:
    std::vector<std::vector<double>> expert_;
    std::vector<double> row_;
    std::size_t t_ = 0;
    std::size_t aligned_ = 0;
};

// R_t = touch - alpha * dtw_pseudo.
double mix_reward(double touch, double dtw_pseudo, double alpha);

// Demonstration whose initial all-agent positions are nearest to
// episode_start; ties broken by lowest episode id.
const Episode& match_expert(const std::vector<double>& episode_start,
                            const std::vector<Episode>& demo_pool);
const Episode* match_expert(const std::vector<double>& episode_start,
                            const std::vector<const Episode*>& demo_pool);

}  // namespace animarl

#endif
