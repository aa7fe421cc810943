#pragma once

#include <span>

namespace aoi {

struct Delivery {
    double time;             ///< arrival instant at the monitor
    double generation_time;  ///< when the update was sampled
};

/// Sawtooth age process at the monitor, Delta(t) = t - u(t), with an exact
/// running integral over [measure_from, now].
class MonitorState {
public:
    /// The process starts at `start_time` with age `initial_age`; the integral
    /// accumulates only from `measure_from` (clamped to >= start_time).
    explicit MonitorState(double start_time = 0.0, double initial_age = 0.0,
                          double measure_from = 0.0);

    /// Integrates the unit-slope ramp up to `t`. Time never moves backwards.
    void advance(double t);

    /// Advances to `t` and applies the staleness filter. Returns true when the
    /// update is fresher than the monitor's current information.
    bool deliver(double t, double generation_time);

    double now() const noexcept { return now_; }
    double age() const noexcept { return now_ - last_generation_; }
    double last_accepted_generation_time() const noexcept { return last_generation_; }
    double age_integral() const noexcept { return integral_; }

private:
    double last_generation_;
    double now_;
    double measure_from_;
    double integral_ = 0.0;
};

struct Window {
    double start;
    double end;
};

/// Time-average of the sawtooth over `window` for a timestamp-sorted delivery
/// sequence inside the window. Throws std::invalid_argument on an empty window,
/// unsorted deliveries, or deliveries outside the window.
double time_average_age(std::span<const Delivery> deliveries, Window window,
                        double initial_age = 0.0);

}  // namespace aoi
