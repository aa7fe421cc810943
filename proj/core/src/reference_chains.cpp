#include "aoi/reference_chains.hpp"

#include "aoi/errors.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace aoi {

namespace {

void require_positive(double value, const char* name) {
    if (!std::isfinite(value) || value <= 0.0) {
        throw ModelError(std::string(name) + " must be positive and finite, got " +
                         std::to_string(value));
    }
}

DenseMatrix copies(std::vector<std::optional<std::size_t>> sources) {
    return ResetMap::from_sources(std::move(sources)).dense();
}

}  // namespace

ShsModel build_mm11_chain(double lambda, double mu) {
    require_positive(lambda, "lambda");
    require_positive(mu, "mu");
    std::vector<TransitionSpec> transitions = {
        {0, 1, lambda, copies({0, std::nullopt})},
        {1, 0, mu, copies({1, std::nullopt})},
    };
    return build_model(2, 2, std::move(transitions), {{1, 0}, {1, 1}});
}

ShsModel build_mm2_preemptive_chain(double lambda, double mu) {
    require_positive(lambda, "lambda");
    require_positive(mu, "mu");
    // Components are kept ordered: x1 <= x2 <= x0.
    std::vector<TransitionSpec> transitions = {
        // Arrival replaces the staler slot and becomes the fresher one.
        {0, 0, lambda, copies({0, std::nullopt, 1})},
        // Fresher slot delivers; the staler slot is superseded.
        {0, 0, mu, copies({1, 1, 1})},
        // Staler slot delivers (a no-op when it holds a fake update).
        {0, 0, mu, copies({2, 1, 2})},
    };
    return build_model(1, 3, std::move(transitions), {{1, 1, 1}});
}

double monitor_average_age(const ShsModel& model) {
    const auto pi = solve_stationary(model);
    return average_age(solve_correlation(model, pi), 0);
}

}  // namespace aoi
