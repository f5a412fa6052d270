#ifndef ANIMARL_LOCOMOTION_HPP
#define ANIMARL_LOCOMOTION_HPP

#include <cstddef>
#include <vector>

#include "animarl/geometry.hpp"

namespace animarl {

// Fitted velocity-transition parameters with diagnostics. d may exceed 1;
// callers read d_out_of_range() instead of relying on clamping.
struct LocomotionParams {
    double d = 0.0;       // damping coefficient
    double u = 0.0;       // input amplitude, length/s^2
    double v_on = 0.0;    // typical speed right after a rest-to-motion onset
    double v_max = 0.0;   // median of the top-1% speeds
    double rmse = 0.0;    // one-step velocity prediction RMSE
    long n_transitions = 0;

    bool d_out_of_range() const { return d > 1.0; }
};

// Velocity sequences of one agent role, uniform sampling interval.
struct TrajectoryBatch {
    std::vector<std::vector<Vec2>> tracks;
    double dt = 0.1;
};

// Indices t with |v|_t < th_acc*dt and |v|_{t+1} >= th_acc*dt.
std::vector<std::size_t> detect_onsets(const std::vector<double>& speeds, double th_acc,
                                       double dt);

constexpr double kDefaultOnsetThreshold = 0.5;  // length/s^2

// Fits (d, u) from onset and top-speed statistics; fills rmse by validating
// against actions inferred from the same batch.
LocomotionParams estimate(const TrajectoryBatch& batch, double th_acc = kDefaultOnsetThreshold);

// One-step velocity prediction RMSE given per-track action sequences
// (each of length track_len - 1).
double validate(const LocomotionParams& params, const TrajectoryBatch& batch,
                const std::vector<std::vector<int>>& actions);

// Recovers discrete action indices from consecutive velocities.
std::vector<int> infer_actions_track(const std::vector<Vec2>& velocities,
                                     const LocomotionParams& params, double dt);
std::vector<std::vector<int>> infer_actions(const TrajectoryBatch& batch,
                                            const LocomotionParams& params);

}  // namespace animarl

#endif
