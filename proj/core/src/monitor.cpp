#include "aoi/monitor.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace aoi {

MonitorState::MonitorState(double start_time, double initial_age, double measure_from)
    : last_generation_(start_time - initial_age),
      now_(start_time),
      measure_from_(std::max(measure_from, start_time)) {
    if (initial_age < 0.0) {
        throw std::invalid_argument("initial age must be nonnegative");
    }
}

void MonitorState::advance(double t) {
    if (t < now_) {
        throw std::invalid_argument("monitor time moved backwards: " + std::to_string(t) + " < " +
                                    std::to_string(now_));
    }
    const double lo = std::max(now_, measure_from_);
    if (t > lo) {
        // Trapezoid of a unit-slope ramp is exact.
        const double age_lo = lo - last_generation_;
        const double age_hi = t - last_generation_;
        integral_ += 0.5 * (age_lo + age_hi) * (t - lo);
    }
    now_ = t;
}

bool MonitorState::deliver(double t, double generation_time) {
    advance(t);
    if (generation_time > t) {
        throw std::invalid_argument("update delivered before it was generated");
    }
    if (generation_time > last_generation_) {
        last_generation_ = generation_time;
        return true;
    }
    return false;
}

double time_average_age(std::span<const Delivery> deliveries, Window window, double initial_age) {
    if (!(window.end > window.start)) {
        throw std::invalid_argument("empty averaging window");
    }
    MonitorState monitor(window.start, initial_age, window.start);
    double previous = window.start;
    for (const auto& d : deliveries) {
        if (d.time < previous) {
            throw std::invalid_argument("deliveries are not sorted by time");
        }
        if (d.time > window.end) {
            throw std::invalid_argument("delivery after the end of the window");
        }
        monitor.deliver(d.time, d.generation_time);
        previous = d.time;
    }
    monitor.advance(window.end);
    return monitor.age_integral() / (window.end - window.start);
}

}  // namespace aoi
