#pragma once

// Event-driven simulation of the status-update systems, used as an
// independent check on the SHS analysis.
//
// Conventions:
//  - the system starts empty at t = 0 with monitor age 0;
//  - the time average covers [warmup * horizon, horizon];
//  - simultaneous events are ordered by scheduling order (a monotone sequence
//    number breaks time ties);
//  - trial k draws every random process from its own substream
//    substream_seed(seed, k, stream), so per-trial values do not depend on
//    trial order or on how trials are spread over threads.

#include "aoi/two_sensor.hpp"

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

namespace aoi {

struct SimConfig {
    double horizon = 2e5;
    std::size_t num_trials = 10;
    std::uint64_t seed = 1;
    double warmup = 0.01;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;

    void validate() const;
};

struct SimResult {
    double mean_aoi = 0.0;
    std::vector<double> trial_values;
    double stderr_aoi = 0.0;
    double ci95_halfwidth = 0.0;
    std::uint64_t events_processed = 0;
};

enum class TraceEvent { arrival, blocked, preempt, delivered, stale };

std::string_view to_string(TraceEvent e) noexcept;

/// One line of the debug event trace. `sensor` is the sensor index for the
/// parallel-queue models and the server index for the M/M/2 model (-1 when
/// not applicable); `age` is the monitor age right after the event.
struct TraceRecord {
    double time;
    TraceEvent event;
    int sensor;
    double generation_time;
    double age;
};

/// Receives trial 0's events in time order. Empty = no tracing.
using TraceSink = std::function<void(const TraceRecord&)>;

/// Upper bound on horizon * (sum of all event rates) for one trial.
inline constexpr double kMaxExpectedEventsPerTrial = 2e9;

SimResult simulate_two_sensor(const TwoSensorParams& params, const SimConfig& config,
                              const TraceSink& trace = {});

SimResult simulate_mm11(double lambda, double mu, const SimConfig& config,
                        const TraceSink& trace = {});

SimResult simulate_mm2_preemptive(double lambda, double mu, const SimConfig& config,
                                  const TraceSink& trace = {});

/// Mean, standard error, and 1.96-sigma half-width over per-trial values.
SimResult summarize_trials(std::vector<double> trial_values, std::uint64_t events_processed);

}  // namespace aoi
