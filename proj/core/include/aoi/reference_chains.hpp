#pragma once

#include "aoi/shs.hpp"

namespace aoi {

/// Single-sensor M/M/1/1 blocking queue: states {idle, busy}, components
/// {monitor age, packet age}.
ShsModel build_mm11_chain(double lambda, double mu);

/// One Poisson source feeding two rate-mu servers, where an arrival takes an
/// idle server or otherwise preempts the staler in-service update, and the
/// monitor discards stale deliveries.
///
/// Idle servers and servers holding a superseded update are modeled as holding
/// a "fake" update whose age equals the monitor age, which makes the system a
/// single discrete state with components {monitor, fresher slot, staler slot}.
ShsModel build_mm2_preemptive_chain(double lambda, double mu);

/// average_age(solve_correlation(model, solve_stationary(model)), 0).
double monitor_average_age(const ShsModel& model);

}  // namespace aoi
