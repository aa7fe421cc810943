#include <doctest.h>

#include "aoi/errors.hpp"
#include "aoi/shs.hpp"
#include "aoi/shs_json.hpp"
#include "aoi/two_sensor.hpp"

#include "random_chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace aoi;
using aoi::testing::copy_map;
using aoi::testing::random_chain;

namespace {

ShsModel two_state(double a, double b) {
    return build_model(2, 2,
                       {{0, 1, a, copy_map({0, std::nullopt})}, {1, 0, b, copy_map({1, std::nullopt})}},
                       {{1, 0}, {1, 1}});
}

// Brute-force oracle: integrate the Kolmogorov forward equations with RK4.
std::vector<double> transient_limit(const ShsModel& model, double horizon, double dt) {
    const std::size_t n = model.num_states();
    std::vector<double> p(n, 1.0 / static_cast<double>(n));
    auto derivative = [&](const std::vector<double>& x) {
        std::vector<double> d(n, 0.0);
        for (const auto& t : model.transitions()) {
            d[t.to_state] += t.rate * x[t.from_state];
            d[t.from_state] -= t.rate * x[t.from_state];
        }
        return d;
    };
    auto axpy = [&](const std::vector<double>& x, const std::vector<double>& d, double h) {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = x[i] + h * d[i];
        }
        return y;
    };
    const auto steps = static_cast<std::size_t>(horizon / dt);
    for (std::size_t s = 0; s < steps; ++s) {
        const auto k1 = derivative(p);
        const auto k2 = derivative(axpy(p, k1, dt / 2));
        const auto k3 = derivative(axpy(p, k2, dt / 2));
        const auto k4 = derivative(axpy(p, k3, dt));
        for (std::size_t i = 0; i < n; ++i) {
            p[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        }
    }
    return p;
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

TEST_CASE("build_model accepts the minimal two-state chain") {
    const auto m = two_state(1.0, 1.0);
    CHECK(m.num_states() == 2);
    CHECK(m.num_components() == 2);
    CHECK(m.transitions().size() == 2);
    CHECK(m.exit_rate(0) == 1.0);
}

TEST_CASE("build_model rejects malformed input") {
    const auto ok_map = copy_map({0, std::nullopt});
    const std::vector<std::vector<int>> slopes{{1, 0}, {1, 1}};

    SUBCASE("zero rate") {
        CHECK_THROWS_WITH_AS(build_model(2, 2, {{0, 1, 0.0, ok_map}, {1, 0, 1.0, ok_map}}, slopes),
                             doctest::Contains("nonpositive rate"), ModelError);
    }
    SUBCASE("negative and non-finite rates") {
        CHECK_THROWS_AS(build_model(2, 2, {{0, 1, -1.0, ok_map}, {1, 0, 1.0, ok_map}}, slopes),
                        ModelError);
        CHECK_THROWS_AS(build_model(2, 2, {{0, 1, INFINITY, ok_map}, {1, 0, 1.0, ok_map}}, slopes),
                        ModelError);
        CHECK_THROWS_AS(build_model(2, 2, {{0, 1, NAN, ok_map}, {1, 0, 1.0, ok_map}}, slopes),
                        ModelError);
    }
    SUBCASE("state index out of range names the transition") {
        CHECK_THROWS_WITH_AS(build_model(2, 2, {{0, 1, 1.0, ok_map}, {1, 2, 1.0, ok_map}}, slopes),
                             doctest::Contains("transition 1 (1 -> 2)"), ModelError);
    }
    SUBCASE("reset map column with two nonzeros") {
        const DenseMatrix bad{{1, 0}, {1, 0}};
        CHECK_THROWS_WITH_AS(build_model(2, 2, {{0, 1, 1.0, bad}, {1, 0, 1.0, ok_map}}, slopes),
                             doctest::Contains("multiple nonzero"), ModelError);
    }
    SUBCASE("reset map entry outside {0, 1}") {
        const DenseMatrix bad{{0.5, 0}, {0, 0}};
        CHECK_THROWS_AS(build_model(2, 2, {{0, 1, 1.0, bad}, {1, 0, 1.0, ok_map}}, slopes),
                        ModelError);
    }
    SUBCASE("reset map of the wrong size") {
        const DenseMatrix bad{{1}};
        CHECK_THROWS_AS(build_model(2, 2, {{0, 1, 1.0, bad}, {1, 0, 1.0, ok_map}}, slopes),
                        ModelError);
    }
    SUBCASE("non-binary slope") {
        CHECK_THROWS_WITH_AS(
            build_model(2, 2, {{0, 1, 1.0, ok_map}, {1, 0, 1.0, ok_map}}, {{1, 0}, {1, 2}}),
            doctest::Contains("not binary"), ModelError);
    }
    SUBCASE("reducible chain names the state") {
        CHECK_THROWS_WITH_AS(build_model(3, 2, {{0, 1, 1.0, ok_map}, {1, 0, 1.0, ok_map}},
                                         {{1, 0}, {1, 1}, {1, 1}}),
                             doctest::Contains("state 2"), ModelError);
        // 0 -> 1 with no way back.
        CHECK_THROWS_WITH_AS(build_model(2, 2, {{0, 1, 1.0, ok_map}}, slopes),
                             doctest::Contains("not irreducible"), ModelError);
    }
}

TEST_CASE("two-state stationary distribution is b/(a+b), a/(a+b)") {
    for (auto [a, b] : {std::pair{1.0, 1.0}, {0.3, 2.0}, {7.0, 0.5}}) {
        const auto pi = solve_stationary(two_state(a, b));
        CHECK(pi[0] == doctest::Approx(b / (a + b)).epsilon(1e-14));
        CHECK(pi[1] == doctest::Approx(a / (a + b)).epsilon(1e-14));
    }
}

TEST_CASE("two-sensor chain stationary distribution at unit rates") {
    const auto pi = solve_stationary(build_two_sensor_chain({1, 1, 1, 1}));
    const std::vector<double> expected{0.25, 0.1875, 0.0625, 0.09375, 0.1875,
                                       0.0625, 0.09375, 0.03125, 0.03125};
    REQUIRE(pi.size() == expected.size());
    for (std::size_t q = 0; q < expected.size(); ++q) {
        CHECK(std::abs(pi[q] - expected[q]) < 1e-14);
    }
}

TEST_CASE("average_age on the two-sensor chain") {
    const auto m = build_two_sensor_chain({1, 1, 1, 1});
    const auto v = solve_correlation(m, solve_stationary(m));
    CHECK(std::abs(average_age(v, 0) - 103.0 / 64.0) < 1e-13);

    const auto m2 = build_two_sensor_chain({0.5, 0.5, 1, 1});
    CHECK(std::abs(average_age(solve_correlation(m2, solve_stationary(m2)), 0) - 677.0 / 324.0) <
          1e-13);

    CHECK_THROWS_AS(average_age(v, 3), ModelError);
}

TEST_CASE("M/M/1/1 correlation solve matches the textbook average age") {
    for (auto [lambda, mu] : {std::pair{1.0, 1.0}, {0.5, 1.0}, {2.0, 3.0}}) {
        const auto m = two_state(lambda, mu);
        const auto age = average_age(solve_correlation(m, solve_stationary(m)), 0);
        CHECK(age == doctest::Approx(1 / lambda + 2 / mu - 1 / (lambda + mu)).epsilon(1e-13));
    }
}

TEST_CASE("an age component that never resets is rejected with a condition estimate") {
    // One state, self-loop copying everything, slope 1: v * rate = 1 + rate * v.
    const auto m = build_model(1, 1, {{0, 0, 1.0, copy_map({0})}}, {{1}});
    const auto pi = solve_stationary(m);
    CHECK(pi[0] == 1.0);
    try {
        solve_correlation(m, pi);
        FAIL("expected SolveError");
    } catch (const SolveError& e) {
        CHECK(e.condition_estimate() > 1e12);
        CHECK(std::string(e.what()).find("condition estimate") != std::string::npos);
    }
}

TEST_CASE("property: random chains satisfy normalization, balance, and correlation residuals") {
    std::mt19937_64 rng(20261015);
    for (int trial = 0; trial < 200; ++trial) {
        const auto chain = random_chain(rng, 6);
        const auto m = chain.build();
        const auto pi = solve_stationary(m);
        const double total = std::accumulate(pi.probs.begin(), pi.probs.end(), 0.0);
        CHECK(std::abs(total - 1.0) < 1e-12);
        for (double p : pi.probs) {
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
        }
        CHECK(max_of(balance_residuals(m, pi)) < 1e-10);

        const auto v = solve_correlation(m, pi);
        CHECK(max_of(correlation_residuals(m, pi, v)) < 1e-10);
        for (double x : v.flat()) {
            CHECK(x >= 0.0);
        }
    }
}

TEST_CASE("property: stationary solve matches long-run transient integration (<= 3 states)") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const auto m = random_chain(rng, 3).build();
        const auto pi = solve_stationary(m);
        const auto limit = transient_limit(m, 100.0, 0.005);
        for (std::size_t q = 0; q < m.num_states(); ++q) {
            CHECK(std::abs(pi[q] - limit[q]) < 1e-6);
        }
    }
}

TEST_CASE("property: relabeling states leaves every average age unchanged") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const auto chain = random_chain(rng, 6);
        std::vector<std::size_t> perm(chain.states);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);

        auto relabeled = chain;
        for (auto& t : relabeled.transitions) {
            t.from_state = perm[t.from_state];
            t.to_state = perm[t.to_state];
        }
        for (std::size_t q = 0; q < chain.states; ++q) {
            relabeled.slopes[perm[q]] = chain.slopes[q];
        }
        std::shuffle(relabeled.transitions.begin(), relabeled.transitions.end(), rng);

        const auto a = chain.build();
        const auto b = relabeled.build();
        const auto va = solve_correlation(a, solve_stationary(a));
        const auto vb = solve_correlation(b, solve_stationary(b));
        for (std::size_t i = 0; i < chain.components; ++i) {
            CHECK(std::abs(average_age(va, i) - average_age(vb, i)) < 1e-12);
        }
    }
}

TEST_CASE("property: scaling every rate by c scales average ages by 1/c") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const auto chain = random_chain(rng, 6);
        const auto base = chain.build();
        const auto v = solve_correlation(base, solve_stationary(base));
        for (double c : {0.5, 2.0, 10.0}) {
            auto scaled = chain;
            for (auto& t : scaled.transitions) {
                t.rate *= c;
            }
            const auto m = scaled.build();
            const auto vs = solve_correlation(m, solve_stationary(m));
            for (std::size_t i = 0; i < chain.components; ++i) {
                const double expected = average_age(v, i) / c;
                CHECK(std::abs(average_age(vs, i) - expected) <= 1e-10 * expected);
            }
        }
    }
}

TEST_CASE("JSON serialization preserves the model") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = random_chain(rng, 5).build();
        const auto back = model_from_json(model_to_json(m));
        REQUIRE(back.num_states() == m.num_states());
        REQUIRE(back.num_components() == m.num_components());
        CHECK(back.slopes() == m.slopes());
        REQUIRE(back.transitions().size() == m.transitions().size());
        for (std::size_t l = 0; l < m.transitions().size(); ++l) {
            const auto& x = m.transitions()[l];
            const auto& y = back.transitions()[l];
            CHECK(x.from_state == y.from_state);
            CHECK(x.to_state == y.to_state);
            CHECK(x.rate == y.rate);
            CHECK(x.reset == y.reset);
        }
    }
}

TEST_CASE("JSON parsing reports malformed documents as ModelError") {
    CHECK_THROWS_AS(model_from_json("{not json"), ModelError);
    CHECK_THROWS_AS(model_from_json(R"({"num_states": 1})"), ModelError);
    CHECK_THROWS_WITH_AS(model_from_json(R"({
        "num_states": 1, "num_components": 1, "slopes": [[1]],
        "transitions": [{"from": 0, "to": 0, "rate": 0, "reset_map": [[0]]}]})"),
                         doctest::Contains("nonpositive rate"), ModelError);
}
