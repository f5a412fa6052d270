#include <doctest.h>

#include <cmath>
#include <cstring>

#include "animarl/demo_gen.hpp"
#include "animarl/env.hpp"
#include "animarl/errors.hpp"
#include "animarl/rng.hpp"

using namespace animarl;

namespace {

WorldConfig default_config() {
    WorldConfig cfg;
    return cfg;
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

bool bit_equal(const Vec2& a, const Vec2& b) { return bit_equal(a.x, b.x) && bit_equal(a.y, b.y); }

}  // namespace

TEST_CASE("action set has 13 entries with unit directions at 30 degree spacing") {
    const auto& dirs = action_directions();
    CHECK(dirs.size() == 13);
    CHECK(dirs[0].norm() == 0.0);
    for (int k = 1; k < 13; ++k) CHECK(dirs[k].norm() == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 1; k < 12; ++k) {
        double dot = dirs[k].dot(dirs[k + 1]);
        CHECK(dot == doctest::Approx(std::cos(M_PI / 6.0)).epsilon(1e-12));
    }
    CHECK(dirs[1].x == doctest::Approx(1.0));
    CHECK(dirs[4].y == doctest::Approx(1.0));  // 90 degrees
}

TEST_CASE("velocity transition matches the closed-form update") {
    Dynamics dyn{0.25, 3.0};
    Vec2 v{1.0, 0.0};
    Vec2 out = velocity_transition(v, 1, dyn, heading_of(v), 0.1);
    CHECK(out.x == doctest::Approx(1.05).epsilon(1e-12));
    CHECK(out.y == doctest::Approx(0.0));
}

TEST_CASE("no-op action from rest stays at rest") {
    Dynamics dyn{0.4, 2.0};
    Vec2 out = velocity_transition({0, 0}, 0, dyn, heading_of({0, 0}), 0.1);
    CHECK(out.x == 0.0);
    CHECK(out.y == 0.0);
}

TEST_CASE("constant action speed converges monotonically to u*dt/d") {
    Dynamics dyn{0.25, 3.0};
    double dt = 0.1;
    double limit = dyn.u * dt / dyn.d;
    Vec2 v{0, 0};
    double prev_speed = 0.0;
    int bound = static_cast<int>(std::ceil(std::log(1e-6) / std::log(1.0 - dyn.d)));
    for (int k = 0; k < bound; ++k) {
        v = velocity_transition(v, 1, dyn, heading_of(v), dt);
        CHECK(v.norm() >= prev_speed);
        prev_speed = v.norm();
    }
    CHECK(std::abs(v.norm() - limit) < 1e-6);

    // iterate to numerical convergence
    for (int k = 0; k < 10000; ++k) {
        Vec2 next = velocity_transition(v, 1, dyn, heading_of(v), dt);
        if ((next - v).norm() < 1e-9) break;
        v = next;
    }
    CHECK(v.norm() == doctest::Approx(1.2).epsilon(1e-9));
}

TEST_CASE("velocity transition rejects non-finite inputs") {
    Dynamics dyn{0.25, 3.0};
    CHECK_THROWS_AS(velocity_transition({std::nan(""), 0}, 1, dyn, {1, 0}, 0.1),
                    InvalidStateError);
}

TEST_CASE("local frame rotates actions by the heading") {
    Dynamics dyn{0.0, 1.0};
    // heading +y: local forward becomes world +y
    Vec2 out = velocity_transition({0, 1.0}, 1, dyn, heading_of({0, 1.0}), 1.0);
    CHECK(out.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(out.y == doctest::Approx(2.0).epsilon(1e-12));
    // at rest the local frame defaults to the world frame
    Vec2 rest = velocity_transition({0, 0}, 4, dyn, heading_of({0, 0}), 1.0);
    CHECK(rest.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rest.y == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("contact terminates with reward for the touching chaser") {
    WorldConfig cfg = default_config();
    std::vector<AgentState> states(3);
    states[0] = {{0.0, 0.0}, {0, 0}, Role::Chaser, true};
    states[1] = {{-0.8, -0.8}, {0, 0}, Role::Chaser, true};
    states[2] = {{0.05, 0.0}, {0, 0}, Role::Evader, true};
    StepOutcome out = step(states, {0, 0, 0}, cfg, 0.0);
    CHECK(out.terminated);
    CHECK(out.cause == TerminationCause::Contact);
    CHECK(out.winner == Role::Chaser);
    CHECK(out.rewards[0] == doctest::Approx(1.0));
    CHECK(out.rewards[1] == doctest::Approx(0.0));
}

TEST_CASE("boundary exit penalizes the offender and ends the episode") {
    WorldConfig cfg = default_config();
    std::vector<AgentState> states(3);
    states[0] = {{-0.5, 0.0}, {0, 0}, Role::Chaser, true};
    states[1] = {{-0.5, 0.5}, {0, 0}, Role::Chaser, true};
    states[2] = {{1.09, 0.0}, {1.0, 0.0}, Role::Evader, true};
    // evader keeps accelerating +x: v' = 0.75 + 0.3 = 1.05, position 1.195 > 1.1
    StepOutcome out = step(states, {0, 0, 1}, cfg, 0.0);
    CHECK(out.terminated);
    CHECK(out.cause == TerminationCause::Boundary);
    CHECK(out.winner == Role::Chaser);
    CHECK(out.rewards[2] == doctest::Approx(-10.0));
    CHECK(out.next_states[2].position.x > 1.1);
}

TEST_CASE("surviving step accrues dt reward for the evader") {
    WorldConfig cfg = default_config();
    std::vector<AgentState> states(3);
    states[0] = {{-0.5, -0.5}, {0, 0}, Role::Chaser, true};
    states[1] = {{-0.5, 0.5}, {0, 0}, Role::Chaser, true};
    states[2] = {{0.5, 0.0}, {0, 0}, Role::Evader, true};
    StepOutcome out = step(states, {0, 0, 0}, cfg, 0.0);
    CHECK_FALSE(out.terminated);
    CHECK(out.cause == TerminationCause::None);
    CHECK(out.rewards[2] == doctest::Approx(0.1));
    CHECK(out.rewards[0] == doctest::Approx(0.0));
}

TEST_CASE("timeout fires when the next step reaches the time limit") {
    WorldConfig cfg = default_config();
    std::vector<AgentState> states(3);
    states[0] = {{-0.5, -0.5}, {0, 0}, Role::Chaser, true};
    states[1] = {{-0.5, 0.5}, {0, 0}, Role::Chaser, true};
    states[2] = {{0.5, 0.0}, {0, 0}, Role::Evader, true};
    StepOutcome out = step(states, {0, 0, 0}, cfg, 14.7);
    CHECK(out.terminated);
    CHECK(out.cause == TerminationCause::Timeout);
    CHECK(out.winner == Role::Evader);
}

TEST_CASE("step rejects mismatched action counts") {
    WorldConfig cfg = default_config();
    std::vector<AgentState> states(3);
    states[0] = {{0, 0}, {0, 0}, Role::Chaser, true};
    states[1] = {{0.3, 0}, {0, 0}, Role::Chaser, true};
    states[2] = {{0.6, 0}, {0, 0}, Role::Evader, true};
    CHECK_THROWS_AS(step(states, {0, 0}, cfg, 0.0), ContractError);
}

TEST_CASE("step is deterministic bit for bit") {
    WorldConfig cfg = default_config();
    std::vector<AgentState> states = reset(cfg, 99);
    for (auto& s : states) s.velocity = {0.321, -0.123};
    StepOutcome a = step(states, {3, 7, 11}, cfg, 0.5);
    StepOutcome b = step(states, {3, 7, 11}, cfg, 0.5);
    for (std::size_t i = 0; i < a.next_states.size(); ++i) {
        CHECK(bit_equal(a.next_states[i].position, b.next_states[i].position));
        CHECK(bit_equal(a.next_states[i].velocity, b.next_states[i].velocity));
        CHECK(bit_equal(a.rewards[i], b.rewards[i]));
    }
    CHECK(a.terminated == b.terminated);
    CHECK(a.cause == b.cause);
}

TEST_CASE("contact detection is symmetric in agent ordering") {
    WorldConfig cfg = default_config();
    cfg.n_chasers = 1;
    cfg.n_evaders = 2;  // evaders listed after the chaser
    std::vector<AgentState> forward(3);
    forward[0] = {{0.0, 0.0}, {0, 0}, Role::Chaser, true};
    forward[1] = {{0.0, 0.09}, {0, 0}, Role::Evader, true};
    forward[2] = {{0.7, 0.7}, {0, 0}, Role::Evader, true};
    StepOutcome a = step(forward, {0, 0, 0}, cfg, 0.0);
    CHECK(a.cause == TerminationCause::Contact);

    // same geometry with roles swapped in listing order
    WorldConfig cfg2 = default_config();
    cfg2.n_chasers = 2;
    cfg2.n_evaders = 1;
    std::vector<AgentState> swapped(3);
    swapped[0] = {{0.0, 0.09}, {0, 0}, Role::Chaser, true};
    swapped[1] = {{0.7, 0.7}, {0, 0}, Role::Chaser, true};
    swapped[2] = {{0.0, 0.0}, {0, 0}, Role::Evader, true};
    StepOutcome b = step(swapped, {0, 0, 0}, cfg2, 0.0);
    CHECK(b.cause == TerminationCause::Contact);
}

TEST_CASE("reset is deterministic and samples inside the start square") {
    WorldConfig cfg = default_config();
    auto a = reset(cfg, 1234);
    auto b = reset(cfg, 1234);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(bit_equal(a[i].position, b[i].position));
        CHECK(a[i].velocity.norm() == 0.0);
    }
    auto c = reset(cfg, 1235);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i].position == c[i].position)) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("reset positions are uniform on [-0.5, 0.5]^2") {
    WorldConfig cfg = default_config();
    double sum_x = 0.0, sum_y = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        auto states = reset(cfg, 50000 + i);
        for (const auto& s : states) {
            CHECK(s.position.x >= -0.5);
            CHECK(s.position.x <= 0.5);
            CHECK(s.position.y >= -0.5);
            CHECK(s.position.y <= 0.5);
        }
        sum_x += states[0].position.x;
        sum_y += states[0].position.y;
    }
    CHECK(std::abs(sum_x / n) < 0.01);
    CHECK(std::abs(sum_y / n) < 0.01);
}

TEST_CASE("observation layout: own state, relative others, condition flag") {
    WorldConfig cfg = default_config();
    std::vector<AgentState> states(3);
    states[0] = {{0.1, 0.2}, {0.01, 0.02}, Role::Chaser, true};
    states[1] = {{0.3, -0.1}, {-0.03, 0.04}, Role::Chaser, true};
    states[2] = {{-0.2, 0.4}, {0.05, -0.06}, Role::Evader, true};

    auto obs = observe(states, 0, 1);
    CHECK(obs.size() == 13);
    CHECK(observation_dim(3) == 13);
    CHECK(obs[0] == doctest::Approx(0.1));
    CHECK(obs[1] == doctest::Approx(0.2));
    CHECK(obs[2] == doctest::Approx(0.01));
    CHECK(obs[3] == doctest::Approx(0.02));
    CHECK(obs[4] == doctest::Approx(0.2));    // rel pos agent 1
    CHECK(obs[5] == doctest::Approx(-0.3));
    CHECK(obs[6] == doctest::Approx(-0.04));  // rel vel agent 1
    CHECK(obs[7] == doctest::Approx(0.02));
    CHECK(obs[12] == doctest::Approx(1.0));

    SUBCASE("translation moves only the own-position entries") {
        auto moved = states;
        for (auto& s : moved) s.position += {0.3, 0.3};
        auto obs2 = observe(moved, 0, 1);
        CHECK(obs2[0] == doctest::Approx(0.4));
        CHECK(obs2[1] == doctest::Approx(0.5));
        for (std::size_t i = 2; i < obs.size(); ++i)
            CHECK(obs2[i] == doctest::Approx(obs[i]).epsilon(1e-12));
    }

    SUBCASE("swapping the other agents permutes their blocks only") {
        auto swapped = states;
        std::swap(swapped[1], swapped[2]);
        auto obs2 = observe(swapped, 0, 1);
        for (int i = 0; i < 4; ++i) {
            CHECK(obs2[4 + i] == doctest::Approx(obs[8 + i]));
            CHECK(obs2[8 + i] == doctest::Approx(obs[4 + i]));
        }
        CHECK(obs2[12] == obs[12]);
    }
}

TEST_CASE("episodes never exceed ceil(time_limit/dt) steps") {
    WorldConfig cfg = default_config();
    const int max_steps = cfg.max_steps();
    CHECK(max_steps == 148);
    Environment env(cfg);
    Rng rng(7);
    for (int ep = 0; ep < 20; ++ep) {
        env.reset(1000 + ep);
        int steps = 0;
        while (!env.done()) {
            std::vector<int> actions(3);
            for (auto& a : actions) a = static_cast<int>(rng.uniform_index(13));
            env.step(actions);
            ++steps;
        }
        CHECK(steps <= max_steps);
    }
}

TEST_CASE("evader time reward over a timeout episode sums to the time limit") {
    WorldConfig cfg = default_config();
    // keep everyone far apart and motionless: guaranteed timeout
    std::vector<AgentState> states(3);
    states[0] = {{-0.9, -0.9}, {0, 0}, Role::Chaser, true};
    states[1] = {{-0.9, 0.9}, {0, 0}, Role::Chaser, true};
    states[2] = {{0.9, 0.9}, {0, 0}, Role::Evader, true};
    Environment env(cfg);
    env.reset_to(states);
    double total = 0.0;
    while (!env.done()) {
        StepOutcome out = env.step({0, 0, 0});
        total += out.rewards[2];
    }
    CHECK(env.cause() == TerminationCause::Timeout);
    CHECK(std::abs(total - cfg.time_limit) <= cfg.dt + 1e-9);
    CHECK(total == doctest::Approx(14.8).epsilon(1e-9));
}
