#include <doctest.h>

#include <cmath>

#include "animarl/env.hpp"
#include "animarl/errors.hpp"
#include "animarl/locomotion.hpp"
#include "animarl/rng.hpp"

using namespace animarl;

namespace {

// Eq-style rollout with rest phases and long straight runs (thrust along the
// current heading) so that onsets and sustained top speeds both appear.
std::vector<Vec2> synthetic_track(double d, double u, double dt, int segments, int run_len,
                                  Rng& rng) {
    Dynamics dyn{d, u};
    std::vector<Vec2> vs;
    vs.push_back({0, 0});
    Vec2 v{0, 0};
    for (int s = 0; s < segments; ++s) {
        int rest = 2 + static_cast<int>(rng.uniform_index(3));
        for (int t = 0; t < rest; ++t) {
            v = {0, 0};
            vs.push_back(v);
        }
        for (int t = 0; t < run_len; ++t) {
            v = velocity_transition(v, 1, dyn, heading_of(v), dt);
            vs.push_back(v);
        }
        // glide back to rest so the next onset starts from zero
        while (v.norm() >= 1e-12) {
            v = v * (1.0 - d);
            if (v.norm() < 1e-12) v = {0, 0};
            vs.push_back(v);
        }
    }
    return vs;
}

TrajectoryBatch synthetic_batch(double d, double u, double dt, int tracks, std::uint64_t seed) {
    TrajectoryBatch batch;
    batch.dt = dt;
    Rng rng(seed);
    for (int i = 0; i < tracks; ++i)
        batch.tracks.push_back(synthetic_track(d, u, dt, 4, 120, rng));
    return batch;
}

}  // namespace

TEST_CASE("onset detection finds the single rest-to-motion crossing") {
    auto onsets = detect_onsets({0.0, 0.0, 0.3, 0.3}, 1.0, 0.1);  // threshold speed 0.1
    REQUIRE(onsets.size() == 1);
    CHECK(onsets[0] == 1);
}

TEST_CASE("onset detection returns empty for always-moving sequences") {
    CHECK(detect_onsets({0.5, 0.6, 0.7, 0.8}, 1.0, 0.1).empty());
    CHECK(detect_onsets({0.5}, 1.0, 0.1).empty());
}

TEST_CASE("onset detection agrees with an exhaustive scan on synthetic rollouts") {
    Rng rng(11);
    auto track = synthetic_track(0.25, 3.0, 0.1, 6, 40, rng);
    std::vector<double> speeds;
    for (const Vec2& v : track) speeds.push_back(v.norm());
    double th_acc = 0.5, dt = 0.1, eps = th_acc * dt;
    auto got = detect_onsets(speeds, th_acc, dt);
    std::vector<std::size_t> expect;
    for (std::size_t t = 0; t + 1 < speeds.size(); ++t)
        if (speeds[t] < eps && speeds[t + 1] >= eps) expect.push_back(t);
    CHECK(got == expect);
    CHECK(!got.empty());
}

TEST_CASE("estimator recovers the generating parameters over a grid") {
    int idx = 0;
    for (double d : {0.1, 0.25, 0.5}) {
        for (double u : {1.0, 2.0, 3.0}) {
            CAPTURE(d);
            CAPTURE(u);
            TrajectoryBatch batch = synthetic_batch(d, u, 0.1, 8, 1000 + idx++);
            LocomotionParams params = estimate(batch);
            CHECK(std::abs(params.d - d) <= 0.05 * d);
            CHECK(std::abs(params.u - u) <= 0.05 * u);
            CHECK_FALSE(params.d_out_of_range());
            CHECK(params.n_transitions > 0);
            CHECK(params.rmse < 1e-9);
        }
    }
}

TEST_CASE("rest-to-onset plateau data gives damping exactly 1") {
    TrajectoryBatch batch;
    batch.dt = 0.1;
    std::vector<Vec2> vs;
    for (int rep = 0; rep < 30; ++rep) {
        vs.push_back({0, 0});
        vs.push_back({0, 0});
        for (int t = 0; t < 3; ++t) vs.push_back({0.4, 0});
    }
    batch.tracks.push_back(vs);
    LocomotionParams p = estimate(batch);
    CHECK(p.v_on == doctest::Approx(0.4));
    CHECK(p.v_max == doctest::Approx(0.4));
    CHECK(p.d == doctest::Approx(1.0));
}

TEST_CASE("onset speed above the sustained speed reports d > 1 without clamping") {
    TrajectoryBatch batch;
    batch.dt = 0.1;
    std::vector<Vec2> vs;
    for (int rep = 0; rep < 30; ++rep) {
        vs.push_back({0, 0});
        vs.push_back({0.5, 0});  // onset jump above the cruising band
        for (int t = 0; t < 300; ++t) vs.push_back({0.30 + 0.05 * t / 300.0, 0});
        vs.push_back({0, 0});
    }
    batch.tracks.push_back(vs);
    LocomotionParams p = estimate(batch);
    CHECK(p.v_on == doctest::Approx(0.5));
    CHECK(p.v_max < 0.5);
    CHECK(p.d > 1.0);
    CHECK(p.d_out_of_range());
}

TEST_CASE("scale equivariance: speeds and threshold scaled together") {
    TrajectoryBatch batch = synthetic_batch(0.25, 2.0, 0.1, 4, 77);
    LocomotionParams base = estimate(batch, 0.5);
    double c = 3.7;
    TrajectoryBatch scaled = batch;
    for (auto& track : scaled.tracks)
        for (auto& v : track) v = v * c;
    LocomotionParams big = estimate(scaled, 0.5 * c);
    CHECK(big.v_on == doctest::Approx(base.v_on * c).epsilon(1e-12));
    CHECK(big.v_max == doctest::Approx(base.v_max * c).epsilon(1e-12));
    CHECK(big.u == doctest::Approx(base.u * c).epsilon(1e-12));
    CHECK(big.d == doctest::Approx(base.d).epsilon(1e-12));
}

TEST_CASE("estimation fails with a clear message when no onsets exist") {
    TrajectoryBatch batch;
    batch.dt = 0.1;
    std::vector<Vec2> vs(200, Vec2{0.8, 0.0});  // always moving
    batch.tracks.push_back(vs);
    CHECK_THROWS_AS(estimate(batch, 0.5), EstimationError);
    try {
        estimate(batch, 0.5);
    } catch (const EstimationError& e) {
        CHECK(std::string(e.what()).find("th_acc") != std::string::npos);
    }
}

TEST_CASE("estimation requires at least 100 samples") {
    TrajectoryBatch batch;
    batch.dt = 0.1;
    batch.tracks.push_back({{0, 0}, {0.3, 0}, {0.4, 0}, {0.5, 0}});
    CHECK_THROWS_AS(estimate(batch), EstimationError);
}

TEST_CASE("validation scores exact model data at zero error") {
    TrajectoryBatch batch = synthetic_batch(0.25, 3.0, 0.1, 3, 5);
    LocomotionParams truth;
    truth.d = 0.25;
    truth.u = 3.0;
    auto actions = infer_actions(batch, truth);
    double rmse = validate(truth, batch, actions);
    CHECK(rmse < 1e-12);
}

TEST_CASE("validation reflects the noise floor of corrupted velocities") {
    Dynamics dyn{0.25, 3.0};
    double dt = 0.1;
    Rng rng(21);
    TrajectoryBatch clean;
    clean.dt = dt;
    std::vector<std::vector<int>> actions;
    // cruising tracks with gentle turns: heading stays well conditioned
    for (int tr = 0; tr < 10; ++tr) {
        std::vector<Vec2> vs{{1.2, 0}};
        std::vector<int> acts;
        Vec2 v{1.2, 0};
        const int turn_options[3] = {1, 2, 12};
        for (int t = 0; t < 200; ++t) {
            int a = turn_options[rng.uniform_index(3)];
            v = velocity_transition(v, a, dyn, heading_of(v), dt);
            acts.push_back(a);
            vs.push_back(v);
        }
        clean.tracks.push_back(vs);
        actions.push_back(acts);
    }
    TrajectoryBatch noisy = clean;
    const double sigma = 0.02;
    for (auto& track : noisy.tracks)
        for (auto& v : track) v += {sigma * rng.normal(), sigma * rng.normal()};
    LocomotionParams truth;
    truth.d = 0.25;
    truth.u = 3.0;
    double rmse = validate(truth, noisy, actions);
    CHECK(rmse >= 0.02);
    CHECK(rmse <= 0.04);
}

TEST_CASE("validation rejects misaligned action sequences") {
    TrajectoryBatch batch;
    batch.dt = 0.1;
    batch.tracks.push_back({{0, 0}, {0.3, 0}, {0.5, 0}});
    LocomotionParams p;
    p.d = 0.25;
    p.u = 3.0;
    CHECK_THROWS_AS(validate(p, batch, {{1}}), ContractError);
}

TEST_CASE("action inference round-trips through the dynamics") {
    Dynamics dyn{0.25, 3.0};
    double dt = 0.1;
    Rng rng(31);
    std::vector<Vec2> vs{{0, 0}};
    std::vector<int> truth_actions;
    Vec2 v{0, 0};
    for (int t = 0; t < 300; ++t) {
        int a = static_cast<int>(rng.uniform_index(13));
        v = velocity_transition(v, a, dyn, heading_of(v), dt);
        truth_actions.push_back(a);
        vs.push_back(v);
    }
    LocomotionParams p;
    p.d = 0.25;
    p.u = 3.0;
    auto inferred = infer_actions_track(vs, p, dt);
    REQUIRE(inferred.size() == truth_actions.size());
    for (std::size_t t = 0; t < inferred.size(); ++t) CHECK(inferred[t] == truth_actions[t]);
}

TEST_CASE("pure damping decay maps to the no-op action") {
    LocomotionParams p;
    p.d = 0.25;
    p.u = 3.0;
    std::vector<Vec2> vs{{0.8, 0.2}, {0.6, 0.15}};  // v' = (1-d) v exactly
    auto actions = infer_actions_track(vs, p, 0.1);
    REQUIRE(actions.size() == 1);
    CHECK(actions[0] == 0);
}

TEST_CASE("residual at exactly 15 degrees resolves to the lower action index") {
    LocomotionParams p;
    p.d = 0.25;
    p.u = 3.0;
    double dt = 0.1;
    double ang = M_PI / 12.0;  // halfway between the 0 and 30 degree bins
    Vec2 v0{0.4, 0.0};
    Vec2 v1 = v0 * (1.0 - p.d) + Vec2{std::cos(ang), std::sin(ang)} * (p.u * dt);
    auto actions = infer_actions_track({v0, v1}, p, dt);
    REQUIRE(actions.size() == 1);
    CHECK(actions[0] == 1);
}

TEST_CASE("action inference requires positive input amplitude") {
    LocomotionParams p;
    p.d = 0.25;
    p.u = 0.0;
    CHECK_THROWS_AS(infer_actions_track({{0, 0}, {0.1, 0}}, p, 0.1), ContractError);
}
