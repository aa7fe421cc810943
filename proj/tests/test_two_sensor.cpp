#include <doctest.h>

#include "aoi/errors.hpp"
#include "aoi/reference_chains.hpp"
#include "aoi/two_sensor.hpp"

#include "two_sensor_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace aoi;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

TwoSensorParams random_params(std::mt19937_64& rng, double lo = 0.05, double hi = 20.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    return {u(rng), u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_CASE("two-sensor chain reproduces the transition table") {
    const auto m = build_two_sensor_chain({0.3, 0.9, 1.2, 0.7});
    CHECK(m.num_states() == 9);
    CHECK(m.num_components() == 3);
    REQUIRE(m.transitions().size() == 18);

    const auto& t2 = m.transitions()[1];
    CHECK(t2.from_state == 1);
    CHECK(t2.to_state == 0);
    CHECK(t2.rate == 1.2);
    CHECK(t2.reset.source(0) == 1u);
    CHECK_FALSE(t2.reset.source(1).has_value());
    CHECK_FALSE(t2.reset.source(2).has_value());

    const auto& t18 = m.transitions()[17];
    CHECK(t18.from_state == 8);
    CHECK(t18.to_state == 1);
    CHECK(t18.rate == 0.7);
    CHECK(t18.reset.source(0) == 0u);
    CHECK(t18.reset.source(1) == 1u);
    CHECK_FALSE(t18.reset.source(2).has_value());

    // (from, to, rate) for every row.
    const std::vector<std::tuple<std::size_t, std::size_t, double>> rows = {
        {0, 1, 0.3}, {1, 0, 1.2}, {1, 3, 0.9}, {3, 2, 0.7}, {2, 0, 1.2}, {2, 7, 0.9},
        {7, 2, 0.7}, {3, 4, 1.2}, {7, 4, 1.2}, {0, 4, 0.9}, {4, 0, 0.7}, {4, 6, 0.3},
        {6, 5, 1.2}, {5, 0, 0.7}, {5, 8, 0.3}, {8, 5, 1.2}, {6, 1, 0.7}, {8, 1, 0.7}};
    for (std::size_t l = 0; l < rows.size(); ++l) {
        CAPTURE(l + 1);
        CHECK(m.transitions()[l].from_state == std::get<0>(rows[l]));
        CHECK(m.transitions()[l].to_state == std::get<1>(rows[l]));
        CHECK(m.transitions()[l].rate == std::get<2>(rows[l]));
    }

    const std::vector<std::vector<int>> slopes = {{1, 0, 0}, {1, 1, 0}, {1, 1, 0},
                                                  {1, 1, 1}, {1, 0, 1}, {1, 0, 1},
                                                  {1, 1, 1}, {1, 1, 1}, {1, 1, 1}};
    CHECK(m.slopes() == slopes);
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(build_two_sensor_chain({0, 1, 1, 1}), ModelError);
    CHECK_THROWS_AS(stationary_closed_form({1, -1, 1, 1}), ModelError);
    CHECK_THROWS_AS(average_aoi_general({1, 1, NAN, 1}), ModelError);
    CHECK_THROWS_AS(average_aoi_symmetric(0, 1), ModelError);
    CHECK_THROWS_AS(average_aoi_equal_service(1, 1, 0), ModelError);
    CHECK_THROWS_AS(zero_wait_limit(-2), ModelError);
}

TEST_CASE("closed-form stationary distribution at unit rates") {
    const auto pi = stationary_closed_form({1, 1, 1, 1});
    CHECK(pi[0] == 0.25);
    CHECK(pi[7] == 0.03125);
    CHECK(pi[8] == 0.03125);
}

TEST_CASE("closed-form stationary distribution equals the generic solve") {
    std::mt19937_64 rng(1);
    for (int k = 0; k < 100; ++k) {
        const auto p = random_params(rng);
        const auto closed = stationary_closed_form(p);
        const auto solved = solve_stationary(build_two_sensor_chain(p));
        double total = 0.0;
        for (std::size_t q = 0; q < 9; ++q) {
            CHECK(std::abs(closed[q] - solved[q]) < 1e-12);
            total += closed[q];
        }
        CHECK(std::abs(total - 1.0) < 1e-12);
    }
}

TEST_CASE("correlation solve satisfies the hand-written two-sensor equations") {
    std::mt19937_64 rng(2);
    for (int k = 0; k < 100; ++k) {
        const auto p = k == 0 ? TwoSensorParams{1, 1, 1, 1} : random_params(rng);
        const auto b = average_aoi_general(p);
        CHECK(testing::max_two_sensor_residual(p, b.stationary, b.correlations) < 1e-10);
    }
}

TEST_CASE("average_aoi_general spot values") {
    CHECK(std::abs(average_aoi_general({1, 1, 1, 1}).average_aoi - 103.0 / 64.0) < 1e-13);
    CHECK(std::abs(average_aoi_general({0.5, 0.5, 1, 1}).average_aoi - 677.0 / 324.0) < 1e-13);
    // Exact rationals from an independent symbolic solve of the same system.
    CHECK(rel(average_aoi_general({0.5, 0.8, 1, 1.4}).average_aoi, 752038655.0 / 451598004.0) < 1e-13);
    CHECK(rel(average_aoi_general({0.3, 0.9, 1.2, 0.7}).average_aoi, 9522503.0 / 4115400.0) < 1e-13);
    CHECK(rel(average_aoi_general({0.1, 0.8, 1, 1}).average_aoi, 21071645.0 / 8732691.0) < 1e-13);

    const auto b = average_aoi_general({0.3, 0.9, 1.2, 0.7});
    CHECK(b.average_aoi > 0.0);
    CHECK(b.average_aoi == average_age(b.correlations, 0));
}

TEST_CASE("swap symmetry") {
    const TwoSensorParams p{0.3, 0.9, 1.2, 0.7};
    CHECK(rel(average_aoi_general(p.swapped()).average_aoi, average_aoi_general(p).average_aoi) <
          1e-10);

    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
        const auto q = random_params(rng);
        CHECK(rel(average_aoi_general(q.swapped()).average_aoi, average_aoi_general(q).average_aoi) <
              1e-10);
    }
}

TEST_CASE("rate scaling") {
    std::mt19937_64 rng(4);
    for (int k = 0; k < 30; ++k) {
        const auto p = random_params(rng);
        const double base = average_aoi_general(p).average_aoi;
        for (double c : {0.5, 2.0, 10.0}) {
            CHECK(rel(average_aoi_general(p.scaled(c)).average_aoi, base / c) < 1e-10);
        }
    }
    CHECK(rel(average_aoi_symmetric(2, 2), average_aoi_symmetric(1, 1) / 2) < 1e-15);
}

TEST_CASE("equal-service closed form") {
    const std::vector<double> grid{0.2, 0.65, 1.1, 1.55, 2.0};
    for (double l1 : grid) {
        for (double l2 : grid) {
            CAPTURE(l1);
            CAPTURE(l2);
            CHECK(rel(average_aoi_equal_service(l1, l2, 1.0),
                      average_aoi_general({l1, l2, 1.0, 1.0}).average_aoi) < 1e-10);
        }
    }
    for (double l : {0.2, 1.0, 5.0}) {
        CHECK(rel(average_aoi_equal_service(l, l, 1.0), average_aoi_symmetric(l, 1.0)) < 1e-12);
    }
    CHECK(std::abs(average_aoi_equal_service(1, 1, 1) - 103.0 / 64.0) < 1e-14);
    // Independent symbolic evaluation: 1.8689674523007855 at (0.2, 2, 1).
    CHECK(rel(average_aoi_equal_service(0.2, 2.0, 1.0), 1.8689674523007855) < 1e-13);
    CHECK(rel(average_aoi_equal_service(2.0, 0.2, 1.0), 1.8689674523007855) < 1e-13);
}

TEST_CASE("symmetric closed form and zero-wait limit") {
    CHECK(average_aoi_symmetric(1, 1) == 1.609375);
    CHECK(rel(average_aoi_symmetric(0.5, 1), 677.0 / 324.0) < 1e-15);
    CHECK(std::abs(average_aoi_symmetric(1e8, 1) - 1.25) < 1e-6);

    CHECK(zero_wait_limit(1) == 1.25);
    CHECK(zero_wait_limit(2) == 0.625);
    for (double mu : {0.5, 1.0, 4.0}) {
        CHECK(rel(average_aoi_symmetric(1e8, mu), zero_wait_limit(mu)) < 1e-6);
    }
}

TEST_CASE("theory surface is strictly decreasing in lambda1 and mu2") {
    const double l2 = 0.8;
    const double m1 = 1.0;
    std::vector<std::vector<double>> surface(9, std::vector<double>(9));
    for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
            surface[i][j] = average_aoi_general({0.1 * (i + 1), l2, m1, 1.0 + 0.1 * j}).average_aoi;
        }
    }
    for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
            if (i + 1 < 9) {
                CHECK(surface[i + 1][j] < surface[i][j]);
            }
            if (j + 1 < 9) {
                CHECK(surface[i][j + 1] < surface[i][j]);
            }
        }
    }
    double smallest = surface[0][0];
    for (const auto& row : surface) {
        for (double x : row) {
            smallest = std::min(smallest, x);
        }
    }
    CHECK(surface[8][8] == smallest);
}

TEST_CASE("reference chains") {
    SUBCASE("M/M/1/1") {
        for (auto [lambda, mu] : {std::pair{0.5, 1.0}, {1.0, 1.0}, {2.0, 1.0}, {50.0, 1.0}}) {
            const double expected = 1 / lambda + 2 / mu - 1 / (lambda + mu);
            CHECK(rel(monitor_average_age(build_mm11_chain(lambda, mu)), expected) < 1e-13);
        }
    }
    SUBCASE("M/M/2 preempt-stalest") {
        // Hand solution of the one-state system.
        for (auto [lambda, mu] : {std::pair{2.0, 1.0}, {0.05, 1.0}, {5.0, 2.0}}) {
            const double expected = 1 / (2 * mu) + 1 / lambda + 1 / (2 * (lambda + mu));
            CHECK(rel(monitor_average_age(build_mm2_preemptive_chain(lambda, mu)), expected) < 1e-13);
        }
    }
}
