#include "aoi/two_sensor.hpp"

#include "aoi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace aoi {

namespace {

constexpr std::optional<std::size_t> kZero = std::nullopt;
constexpr std::size_t kMonitor = 0;
constexpr std::size_t kSensor1 = 1;
constexpr std::size_t kSensor2 = 2;

TransitionSpec make(std::size_t from, std::size_t to, double rate,
                    std::optional<std::size_t> x0, std::optional<std::size_t> x1,
                    std::optional<std::size_t> x2) {
    return {from, to, rate, ResetMap::from_sources({x0, x1, x2}).dense()};
}

void require_positive(double value, const char* name) {
    if (!std::isfinite(value) || value <= 0.0) {
        throw ModelError(std::string(name) + " must be positive and finite, got " +
                         std::to_string(value));
    }
}

}  // namespace

void TwoSensorParams::validate() const {
    require_positive(lambda1, "lambda1");
    require_positive(lambda2, "lambda2");
    require_positive(mu1, "mu1");
    require_positive(mu2, "mu2");
}

ShsModel build_two_sensor_chain(const TwoSensorParams& p) {
    p.validate();
    const double l1 = p.lambda1;
    const double l2 = p.lambda2;
    const double m1 = p.mu1;
    const double m2 = p.mu2;

    std::vector<TransitionSpec> transitions = {
        make(0, 1, l1, kMonitor, kZero, kZero),        // 1  sensor 1 picks up an update
        make(1, 0, m1, kSensor1, kZero, kZero),        // 2  fresh sensor-1 delivery
        make(1, 3, l2, kMonitor, kSensor1, kZero),     // 3
        make(3, 2, m2, kSensor2, kSensor1, kZero),     // 4
        make(2, 0, m1, kMonitor, kZero, kZero),        // 5  stale sensor-1 delivery
        make(2, 7, l2, kMonitor, kSensor1, kZero),     // 6
        make(7, 2, m2, kSensor2, kSensor1, kZero),     // 7
        make(3, 4, m1, kSensor1, kZero, kSensor2),     // 8
        make(7, 4, m1, kMonitor, kZero, kSensor2),     // 9
        make(0, 4, l2, kMonitor, kZero, kZero),        // 10
        make(4, 0, m2, kSensor2, kZero, kZero),        // 11
        make(4, 6, l1, kMonitor, kZero, kSensor2),     // 12
        make(6, 5, m1, kSensor1, kZero, kSensor2),     // 13
        make(5, 0, m2, kMonitor, kZero, kZero),        // 14
        make(5, 8, l1, kMonitor, kZero, kSensor2),     // 15
        make(8, 5, m1, kSensor1, kZero, kSensor2),     // 16
        make(6, 1, m2, kSensor2, kSensor1, kZero),     // 17
        make(8, 1, m2, kMonitor, kSensor1, kZero),     // 18
    };

    // Monitor age always grows; a sensor's packet age grows while it is busy.
    std::vector<std::vector<int>> slopes = {
        {1, 0, 0},                         // 0
        {1, 1, 0}, {1, 1, 0},              // 1, 2
        {1, 1, 1},                         // 3
        {1, 0, 1}, {1, 0, 1},              // 4, 5
        {1, 1, 1}, {1, 1, 1}, {1, 1, 1},   // 6, 7, 8
    };

    return build_model(kTwoSensorStates, kTwoSensorComponents, std::move(transitions),
                       std::move(slopes));
}

StationaryDistribution stationary_closed_form(const TwoSensorParams& p) {
    p.validate();
    const double l1 = p.lambda1;
    const double l2 = p.lambda2;
    const double m1 = p.mu1;
    const double m2 = p.mu2;
    const double ms = m1 + m2;
    const double g = (l1 + m1) * (l2 + m2) * ms * ms;
    const double a = (l2 + m1) * g;  // denominators of the sensor-1-first branch
    const double b = (l1 + m2) * g;  // and of the sensor-2-first branch

    StationaryDistribution pi;
    pi.probs = {
        m1 * m2 * ms * ms / g,
        l1 * m1 * m2 * ms * (l2 + ms) / a,
        l1 * l2 * m2 * m2 * ms / a,
        l1 * l2 * m1 * m2 * (l2 + ms) / a,
        l2 * m1 * m2 * ms * (l1 + ms) / b,
        l1 * l2 * m1 * m1 * ms / b,
        l1 * l2 * m1 * m2 * (l1 + ms) / b,
        l1 * l2 * l2 * m2 * m2 / a,
        l1 * l1 * l2 * m1 * m1 / b,
    };
    return pi;
}

AoiBreakdown average_aoi_general(const TwoSensorParams& params) {
    const auto model = build_two_sensor_chain(params);
    AoiBreakdown out;
    out.stationary = solve_stationary(model);
    out.correlations = solve_correlation(model, out.stationary);
    out.average_aoi = average_age(out.correlations, 0);
    return out;
}

double average_aoi_equal_service(double lambda1, double lambda2, double mu) {
    require_positive(lambda1, "lambda1");
    require_positive(lambda2, "lambda2");
    require_positive(mu, "mu");

    // The expression is homogeneous of degree -1 in the rates; evaluate on
    // rates scaled into (0, 1] and rescale.
    const double s = std::max({lambda1, lambda2, mu});
    const double a = lambda1 / s;
    const double b = lambda2 / s;
    const double m = mu / s;

    const double a2 = a * a, a3 = a2 * a, a4 = a3 * a;
    const double b2 = b * b, b3 = b2 * b, b4 = b3 * b;
    const double m2 = m * m, m3 = m2 * m, m4 = m3 * m;

    const double first = a4 * (17 * b * m2 + 15 * b2 * m + 5 * b3 + 8 * m3) +
                         4 * m3 * (b + m) * (b + m) * (2 * b * m + 2 * b2 + m2) +
                         a3 * (59 * b * m3 + 62 * b2 * m2 + 30 * b3 * m + 5 * b4);
    const double second = 24 * a3 * m4 +
                          a2 * m * (82 * b * m3 + 102 * b2 * m2 + 62 * b3 * m + 15 * b4 + 28 * m4) +
                          a * m2 * (56 * b * m3 + 82 * b2 * m2 + 59 * b3 * m + 17 * b4 + 16 * m4);
    const double am = a + m;
    const double bm = b + m;
    const double denominator = 4 * (a + b) * m * am * am * am * bm * bm * bm;

    return (first / denominator + second / denominator) / s;
}

double average_aoi_symmetric(double lambda, double mu) {
    require_positive(lambda, "lambda");
    require_positive(mu, "mu");

    const double s = std::max(lambda, mu);
    const double l = lambda / s;
    const double m = mu / s;
    const double l2 = l * l, l3 = l2 * l, l4 = l3 * l, l5 = l4 * l;
    const double m2 = m * m, m3 = m2 * m, m4 = m3 * m, m5 = m4 * m;
    const double lm = l + m;

    const double numerator =
        5 * l5 + 20 * l4 * m + 34 * l3 * m2 + 30 * l2 * m3 + 12 * l * m4 + 2 * m5;
    const double denominator = 4 * l * m * lm * lm * lm * lm;
    return numerator / denominator / s;
}

double zero_wait_limit(double mu) {
    require_positive(mu, "mu");
    return 5.0 / (4.0 * mu);
}

}  // namespace aoi
