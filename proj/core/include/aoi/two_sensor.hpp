#pragma once

// Two sensors sample the same process and send updates over dedicated
// M/M/1/1 blocking channels to one monitor that discards stale deliveries.
//
// Discrete states of the SHS chain (x0 monitor age, x1/x2 age of the packet
// held by sensor 1/2):
//   0  both idle
//   1  sensor 1 busy, its packet fresher than the monitor
//   2  sensor 1 busy, its packet already superseded by a sensor-2 delivery
//   3  both busy, sensor 2 packet newer, sensor 1 packet still fresh
//   4  sensor 2 busy, fresh
//   5  sensor 2 busy, superseded by a sensor-1 delivery
//   6  both busy, sensor 1 packet newer, sensor 2 packet still fresh
//   7  both busy, sensor 2 packet newer, sensor 1 packet superseded
//   8  both busy, sensor 1 packet newer, sensor 2 packet superseded

#include "aoi/shs.hpp"

namespace aoi {

struct TwoSensorParams {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double mu1 = 1.0;
    double mu2 = 1.0;

    /// Throws ModelError unless all four rates are strictly positive and finite.
    void validate() const;

    /// Sensor relabeling: (lambda2, lambda1, mu2, mu1).
    TwoSensorParams swapped() const { return {lambda2, lambda1, mu2, mu1}; }
    TwoSensorParams scaled(double c) const { return {c * lambda1, c * lambda2, c * mu1, c * mu2}; }
};

struct AoiBreakdown {
    double average_aoi = 0.0;
    StationaryDistribution stationary;
    CorrelationVectors correlations;
};

inline constexpr std::size_t kTwoSensorStates = 9;
inline constexpr std::size_t kTwoSensorComponents = 3;
inline constexpr std::size_t kTwoSensorTransitions = 18;

/// The 18-transition chain, in the order of the published transition table
/// (index l-1 holds transition l).
ShsModel build_two_sensor_chain(const TwoSensorParams& params);

/// Closed-form stationary probabilities of the nine states.
StationaryDistribution stationary_closed_form(const TwoSensorParams& params);

/// Generic SHS pipeline on the two-sensor chain.
AoiBreakdown average_aoi_general(const TwoSensorParams& params);

/// Closed form for mu1 == mu2 == mu.
double average_aoi_equal_service(double lambda1, double lambda2, double mu);

/// Closed form for lambda1 == lambda2 == lambda and mu1 == mu2 == mu.
double average_aoi_symmetric(double lambda, double mu);

/// lambda -> infinity limit of the symmetric system: 5 / (4 mu).
double zero_wait_limit(double mu);

}  // namespace aoi
