#include <doctest.h>

#include <cmath>

#include "animarl/dtw.hpp"
#include "animarl/episode.hpp"
#include "animarl/errors.hpp"
#include "animarl/rng.hpp"
#include "support/dtw_bruteforce.hpp"

using namespace animarl;

namespace {

std::vector<std::vector<double>> random_sequence(Rng& rng, std::size_t len, std::size_t dim) {
    std::vector<std::vector<double>> seq(len, std::vector<double>(dim));
    for (auto& v : seq)
        for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return seq;
}

Episode tiny_episode(long id, double x0, double y0) {
    Episode e;
    e.episode_id = id;
    e.dt = 0.1;
    e.agents.resize(1);
    e.agents[0].role = Role::Chaser;
    e.agents[0].positions = {{x0, y0}, {x0 + 0.1, y0}};
    e.agents[0].velocities = {{0, 0}, {1, 0}};
    e.outcome = TerminationCause::Timeout;
    return e;
}

}  // namespace

TEST_CASE("identical sequences have zero warping distance") {
    Rng rng(1);
    auto a = random_sequence(rng, 12, 4);
    CHECK(dtw_distance(a, a) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("single-element sequences reduce to the local cost") {
    CHECK(dtw_distance({{0.0}}, {{1.0}}) == doctest::Approx(1.0));
}

TEST_CASE("dynamic program matches exhaustive path enumeration") {
    Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 1 + rng.uniform_index(7);
        std::size_t m = 1 + rng.uniform_index(7);
        auto a = random_sequence(rng, n, 2);
        auto b = random_sequence(rng, m, 2);
        double dp = dtw_distance(a, b);
        double brute = dtw_oracle::brute_force_distance(a, b);
        CHECK(dp == doctest::Approx(brute).epsilon(1e-12));
    }
}

TEST_CASE("warping distance is symmetric") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = random_sequence(rng, 5 + rng.uniform_index(10), 3);
        auto b = random_sequence(rng, 5 + rng.uniform_index(10), 3);
        CHECK(dtw_distance(a, b) == dtw_distance(b, a));
    }
}

TEST_CASE("all warping matrix cells are non-negative") {
    Rng rng(4);
    auto a = random_sequence(rng, 9, 2);
    auto b = random_sequence(rng, 7, 2);
    DtwResult res = dtw_full(a, b);
    for (const auto& row : res.matrix)
        for (double c : row) CHECK(c >= 0.0);
}

TEST_CASE("empty sequences are rejected") {
    CHECK_THROWS_AS(dtw_full({}, {{1.0}}), ContractError);
    CHECK_THROWS_AS(dtw_full({{1.0}}, {}), ContractError);
}

TEST_CASE("incremental rows reproduce the full matrix on every prefix") {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t n = 2 + rng.uniform_index(40);
        std::size_t m = 2 + rng.uniform_index(40);
        auto a = random_sequence(rng, n, 3);
        auto b = random_sequence(rng, m, 3);
        DtwResult full = dtw_full(a, b);
        WarpState ws(b);
        for (std::size_t t = 0; t < n; ++t) {
            double pseudo = ws.append_step(a[t]);
            double row_min = full.matrix[t][0];
            for (std::size_t j = 0; j < m; ++j) {
                CHECK(ws.current_row()[j] == doctest::Approx(full.matrix[t][j]).epsilon(1e-14));
                row_min = std::min(row_min, full.matrix[t][j]);
            }
            CHECK(pseudo == doctest::Approx(row_min).epsilon(1e-14));
            CHECK(pseudo >= 0.0);
        }
    }
}

TEST_CASE("matching prefix keeps the pseudo-penalty at zero") {
    Rng rng(6);
    auto expert = random_sequence(rng, 25, 4);
    WarpState ws(expert);
    for (std::size_t t = 0; t < 10; ++t) CHECK(ws.append_step(expert[t]) == doctest::Approx(0.0));
}

TEST_CASE("constant offset shows up as the first-row penalty") {
    std::vector<std::vector<double>> expert = {{0.0}, {1.0}, {2.0}};
    WarpState ws(expert);
    double delta = 0.25;
    CHECK(ws.append_step({0.0 + delta}) == doctest::Approx(delta));
}

TEST_CASE("reward mixing follows touch minus alpha times penalty") {
    CHECK(mix_reward(1.0, 0.05, 10.0) == doctest::Approx(0.5));
    CHECK(mix_reward(0.7, 123.0, 0.0) == doctest::Approx(0.7));
    CHECK(mix_reward(0.0, 2.3, 1.0) == doctest::Approx(-2.3));
    CHECK_THROWS_AS(mix_reward(1.0, 1.0, -0.5), ContractError);
}

TEST_CASE("expert matching returns the nearest-start demonstration") {
    std::vector<Episode> pool;
    pool.push_back(tiny_episode(0, 0.0, 0.0));
    pool.push_back(tiny_episode(1, 0.5, 0.5));
    pool.push_back(tiny_episode(2, -0.4, 0.2));

    SUBCASE("exact match wins") {
        const Episode& best = match_expert({0.5, 0.5}, pool);
        CHECK(best.episode_id == 1);
    }
    SUBCASE("single-episode pool is the forced choice") {
        std::vector<Episode> one{tiny_episode(9, 0.1, 0.1)};
        CHECK(match_expert({-0.7, 0.9}, one).episode_id == 9);
    }
    SUBCASE("ties break toward the lowest episode id") {
        std::vector<Episode> tied;
        tied.push_back(tiny_episode(5, 0.1, 0.0));
        tied.push_back(tiny_episode(3, -0.1, 0.0));  // same distance from origin
        CHECK(match_expert({0.0, 0.0}, tied).episode_id == 3);
    }
    SUBCASE("agrees with a linear-scan oracle on random pools") {
        Rng rng(7);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<Episode> rand_pool;
            for (long id = 0; id < 20; ++id)
                rand_pool.push_back(tiny_episode(id, rng.uniform(-1, 1), rng.uniform(-1, 1)));
            std::vector<double> query{rng.uniform(-1, 1), rng.uniform(-1, 1)};
            const Episode& best = match_expert(query, rand_pool);
            double best_d = 1e300;
            long best_id = -1;
            for (const auto& e : rand_pool) {
                auto s = e.start_position_features();
                double d = std::hypot(s[0] - query[0], s[1] - query[1]);
                if (d < best_d) {
                    best_d = d;
                    best_id = e.episode_id;
                }
            }
            CHECK(best.episode_id == best_id);
        }
    }
    SUBCASE("empty pool is rejected") {
        std::vector<Episode> empty;
        CHECK_THROWS_AS(match_expert({0.0, 0.0}, empty), ContractError);
    }
}
