#include "animarl/locomotion.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

#include "animarl/env.hpp"
#include "animarl/errors.hpp"
#include "animarl/stats_util.hpp"

namespace animarl {

std::vector<std::size_t> detect_onsets(const std::vector<double>& speeds, double th_acc,
                                       double dt) {
    if (!(th_acc > 0)) throw ContractError("detect_onsets: th_acc must be > 0");
    if (!(dt > 0)) throw ContractError("detect_onsets: dt must be > 0");
    std::vector<std::size_t> onsets;
    if (speeds.size() < 2) return onsets;
    double eps = th_acc * dt;
    for (std::size_t t = 0; t + 1 < speeds.size(); ++t) {
        if (speeds[t] < eps && speeds[t + 1] >= eps) onsets.push_back(t);
    }
    return onsets;
}

namespace {

std::vector<std::vector<Vec2>> usable_tracks(const TrajectoryBatch& batch) {
    std::vector<std::vector<Vec2>> tracks;
    std::size_t skipped = 0;
    for (const auto& tr : batch.tracks) {
        if (tr.size() < 3) {
            ++skipped;
            continue;
        }
        tracks.push_back(tr);
    }
    if (skipped > 0)
        std::cerr << "warning: skipped " << skipped << " track(s) shorter than 3 samples\n";
    return tracks;
}

}  // namespace

LocomotionParams estimate(const TrajectoryBatch& batch, double th_acc) {
    if (!(batch.dt > 0)) throw ContractError("estimate: dt must be > 0");
    TrajectoryBatch usable{usable_tracks(batch), batch.dt};

    std::vector<double> onset_speeds;
    std::vector<double> all_speeds;
    for (const auto& track : usable.tracks) {
        std::vector<double> speeds;
        speeds.reserve(track.size());
        for (const Vec2& v : track) {
            if (!v.finite()) throw InvalidStateError("estimate: non-finite velocity sample");
            speeds.push_back(v.norm());
        }
        for (std::size_t t : detect_onsets(speeds, th_acc, usable.dt))
            onset_speeds.push_back(speeds[t + 1]);
        all_speeds.insert(all_speeds.end(), speeds.begin(), speeds.end());
    }

    if (all_speeds.size() < 100)
        throw EstimationError("estimate: need at least 100 speed samples, got " +
                              std::to_string(all_speeds.size()));
    if (onset_speeds.empty())
        throw EstimationError("estimate: no rest-to-motion onsets at threshold th_acc=" +
                              std::to_string(th_acc));

    std::sort(all_speeds.begin(), all_speeds.end());
    double p99 = quantile_sorted(all_speeds, 0.99);
    std::vector<double> top;
    for (double s : all_speeds)
        if (s > p99) top.push_back(s);
    if (top.empty()) {
        // Ties at the percentile; fall back to the closed upper tail.
        for (double s : all_speeds)
            if (s >= p99) top.push_back(s);
    }

    LocomotionParams params;
    params.v_on = lower_median(onset_speeds);
    params.v_max = lower_median(top);
    params.n_transitions = static_cast<long>(onset_speeds.size());
    if (!(params.v_max > 0) || !std::isfinite(params.v_max))
        throw EstimationError("estimate: degenerate top-percentile speed set");
    params.u = params.v_on / usable.dt;
    params.d = params.v_on / params.v_max;

    if (params.u > 0)
        params.rmse = validate(params, usable, infer_actions(usable, params));
    return params;
}

double validate(const LocomotionParams& params, const TrajectoryBatch& batch,
                const std::vector<std::vector<int>>& actions) {
    if (actions.size() != batch.tracks.size())
        throw ContractError("validate: action tracks do not match velocity tracks");
    double sq_sum = 0.0;
    std::size_t n = 0;
    Dynamics dyn{params.d, params.u};
    for (std::size_t i = 0; i < batch.tracks.size(); ++i) {
        const auto& track = batch.tracks[i];
        if (track.size() < 2) continue;
        if (actions[i].size() != track.size() - 1)
            throw ContractError("validate: action sequence length mismatch on track " +
                                std::to_string(i));
        for (std::size_t t = 0; t + 1 < track.size(); ++t) {
            Vec2 pred = velocity_transition(track[t], actions[i][t], dyn, heading_of(track[t]),
                                            batch.dt);
            sq_sum += (pred - track[t + 1]).norm2();
            ++n;
        }
    }
    if (n == 0) throw ContractError("validate: no transitions to score");
    return std::sqrt(sq_sum / static_cast<double>(n));
}

std::vector<int> infer_actions_track(const std::vector<Vec2>& velocities,
                                     const LocomotionParams& params, double dt) {
    if (!(params.u > 0)) throw ContractError("infer_actions: u must be positive");
    std::vector<int> actions;
    if (velocities.size() < 2) return actions;
    actions.reserve(velocities.size() - 1);
    const auto& dirs = action_directions();
    for (std::size_t t = 0; t + 1 < velocities.size(); ++t) {
        Vec2 residual = (velocities[t + 1] - velocities[t] * (1.0 - params.d)) * (1.0 / (params.u * dt));
        if (residual.norm() < 0.5) {
            actions.push_back(0);
            continue;
        }
        Vec2 local = rotate_from_frame(heading_of(velocities[t]), residual);
        int best = 1;
        double best_dot = dirs[1].dot(local);
        for (int k = 2; k < kNumActions; ++k) {
            double dk = dirs[k].dot(local);
            if (dk > best_dot + 1e-12) {  // exact ties keep the lower index
                best_dot = dk;
                best = k;
            }
        }
        actions.push_back(best);
    }
    return actions;
}

std::vector<std::vector<int>> infer_actions(const TrajectoryBatch& batch,
                                            const LocomotionParams& params) {
    std::vector<std::vector<int>> out;
    out.reserve(batch.tracks.size());
    for (const auto& track : batch.tracks)
        out.push_back(infer_actions_track(track, params, batch.dt));
    return out;
}

}  // namespace animarl
