#include "aoi/simulation.hpp"

#include "aoi/errors.hpp"
#include "aoi/monitor.hpp"
#include "aoi/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <queue>
#include <sstream>
#include <thread>

namespace aoi {

namespace {

enum class EventKind : std::uint8_t { arrival, departure };

struct Event {
    double time;
    std::uint64_t seq;
    EventKind kind;
    int index;
    std::uint64_t version;
};

struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
        if (a.time != b.time) {
            return a.time > b.time;
        }
        return a.seq > b.seq;
    }
};

class EventQueue {
public:
    void schedule(double time, EventKind kind, int index, std::uint64_t version = 0) {
        heap_.push({time, next_seq_++, kind, index, version});
    }
    bool empty() const noexcept { return heap_.empty(); }
    Event pop() {
        Event e = heap_.top();
        heap_.pop();
        return e;
    }

private:
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

struct TrialOutcome {
    double average_age = 0.0;
    std::uint64_t events = 0;
};

class Tracer {
public:
    explicit Tracer(const TraceSink* sink) : sink_(sink) {}

    void operator()(double t, TraceEvent event, int index, double generation,
                    const MonitorState& monitor) const {
        if (sink_ != nullptr) {
            (*sink_)({t, event, index, generation, t - monitor.last_accepted_generation_time()});
        }
    }

private:
    const TraceSink* sink_;
};

// Independent M/M/1/1 blocking sensors sharing one monitor. One sensor is
// the classic M/M/1/1 status-update queue.
TrialOutcome run_blocking_trial(const std::vector<double>& lambdas, const std::vector<double>& mus,
                                const SimConfig& config, std::uint64_t trial,
                                const TraceSink* sink) {
    const std::size_t n = lambdas.size();
    std::vector<RandomStream> arrivals;
    std::vector<RandomStream> services;
    for (std::size_t i = 0; i < n; ++i) {
        arrivals.emplace_back(substream_seed(config.seed, trial, 2 * i));
        services.emplace_back(substream_seed(config.seed, trial, 2 * i + 1));
    }
    std::vector<bool> busy(n, false);
    std::vector<double> generated(n, 0.0);

    const double horizon = config.horizon;
    MonitorState monitor(0.0, 0.0, config.warmup * horizon);
    const Tracer trace(sink);
    EventQueue queue;
    for (std::size_t i = 0; i < n; ++i) {
        queue.schedule(arrivals[i].exponential(lambdas[i]), EventKind::arrival, static_cast<int>(i));
    }

    std::uint64_t events = 0;
    while (!queue.empty()) {
        const Event e = queue.pop();
        if (e.time > horizon) {
            break;
        }
        ++events;
        const auto i = static_cast<std::size_t>(e.index);
        if (e.kind == EventKind::arrival) {
            if (busy[i]) {
                trace(e.time, TraceEvent::blocked, e.index, e.time, monitor);
            } else {
                busy[i] = true;
                generated[i] = e.time;
                queue.schedule(e.time + services[i].exponential(mus[i]), EventKind::departure, e.index);
                trace(e.time, TraceEvent::arrival, e.index, e.time, monitor);
            }
            queue.schedule(e.time + arrivals[i].exponential(lambdas[i]), EventKind::arrival, e.index);
        } else {
            busy[i] = false;
            const bool fresh = monitor.deliver(e.time, generated[i]);
            trace(e.time, fresh ? TraceEvent::delivered : TraceEvent::stale, e.index, generated[i],
                  monitor);
        }
    }
    monitor.advance(horizon);
    return {monitor.age_integral() / ((1.0 - config.warmup) * horizon), events};
}

// One source, two servers; an arrival takes an idle server or preempts the
// in-service update with the older generation time.
TrialOutcome run_mm2_preemptive_trial(double lambda, double mu, const SimConfig& config,
                                      std::uint64_t trial, const TraceSink* sink) {
    constexpr int kServers = 2;
    RandomStream arrivals(substream_seed(config.seed, trial, 0));
    std::vector<RandomStream> services;
    for (int j = 0; j < kServers; ++j) {
        services.emplace_back(substream_seed(config.seed, trial, 1 + static_cast<std::uint64_t>(j)));
    }
    bool busy[kServers] = {false, false};
    double generated[kServers] = {0.0, 0.0};
    std::uint64_t version[kServers] = {0, 0};

    const double horizon = config.horizon;
    MonitorState monitor(0.0, 0.0, config.warmup * horizon);
    const Tracer trace(sink);
    EventQueue queue;
    queue.schedule(arrivals.exponential(lambda), EventKind::arrival, -1);

    std::uint64_t events = 0;
    while (!queue.empty()) {
        const Event e = queue.pop();
        if (e.time > horizon) {
            break;
        }
        if (e.kind == EventKind::departure && e.version != version[e.index]) {
            continue;  // preempted
        }
        ++events;
        if (e.kind == EventKind::arrival) {
            int server = -1;
            for (int j = 0; j < kServers; ++j) {
                if (!busy[j]) {
                    server = j;
                    break;
                }
            }
            if (server < 0) {
                server = generated[0] <= generated[1] ? 0 : 1;
                trace(e.time, TraceEvent::preempt, server, generated[server], monitor);
            }
            busy[server] = true;
            generated[server] = e.time;
            ++version[server];
            queue.schedule(e.time + services[server].exponential(mu), EventKind::departure, server,
                           version[server]);
            trace(e.time, TraceEvent::arrival, server, e.time, monitor);
            queue.schedule(e.time + arrivals.exponential(lambda), EventKind::arrival, -1);
        } else {
            busy[e.index] = false;
            const bool fresh = monitor.deliver(e.time, generated[e.index]);
            trace(e.time, fresh ? TraceEvent::delivered : TraceEvent::stale, e.index,
                  generated[e.index], monitor);
        }
    }
    monitor.advance(horizon);
    return {monitor.age_integral() / ((1.0 - config.warmup) * horizon), events};
}

void check_budget(const SimConfig& config, double total_rate) {
    const double expected = config.horizon * total_rate;
    if (!(expected <= kMaxExpectedEventsPerTrial)) {
        std::ostringstream os;
        os << "event budget exceeded: horizon * total rate = " << expected << " > "
           << kMaxExpectedEventsPerTrial << " per trial";
        throw SimulationError(os.str());
    }
}

void require_positive(double value, const char* name) {
    if (!std::isfinite(value) || value <= 0.0) {
        throw ModelError(std::string(name) + " must be positive and finite, got " +
                         std::to_string(value));
    }
}

// Runs every trial and aggregates in trial-index order.
template <class RunTrial>
SimResult run_trials(const SimConfig& config, const TraceSink& trace, RunTrial run) {
    std::vector<TrialOutcome> outcomes(config.num_trials);
    const TraceSink* sink = trace ? &trace : nullptr;

    unsigned workers = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
    workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(config.num_trials));

    if (workers == 1) {
        for (std::size_t k = 0; k < config.num_trials; ++k) {
            outcomes[k] = run(k, k == 0 ? sink : nullptr);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::atomic<bool> failed{false};
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back([&] {
                    for (std::size_t k = next++; k < config.num_trials; k = next++) {
                        try {
                            outcomes[k] = run(k, k == 0 ? sink : nullptr);
                        } catch (...) {
                            if (!failed.exchange(true)) {
                                failure = std::current_exception();
                            }
                        }
                    }
                });
            }
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    std::vector<double> values;
    values.reserve(outcomes.size());
    std::uint64_t events = 0;
    for (const auto& o : outcomes) {
        values.push_back(o.average_age);
        events += o.events;
    }
    return summarize_trials(std::move(values), events);
}

}  // namespace

void SimConfig::validate() const {
    if (!std::isfinite(horizon) || horizon <= 0.0) {
        throw ModelError("horizon must be positive and finite");
    }
    if (num_trials < 1) {
        throw ModelError("num_trials must be at least 1");
    }
    if (!(warmup >= 0.0 && warmup < 1.0)) {
        throw ModelError("warmup must lie in [0, 1)");
    }
}

std::string_view to_string(TraceEvent e) noexcept {
    switch (e) {
        case TraceEvent::arrival: return "arrival";
        case TraceEvent::blocked: return "blocked";
        case TraceEvent::preempt: return "preempt";
        case TraceEvent::delivered: return "delivered";
        case TraceEvent::stale: return "stale";
    }
    return "unknown";
}

SimResult summarize_trials(std::vector<double> trial_values, std::uint64_t events_processed) {
    SimResult r;
    r.trial_values = std::move(trial_values);
    r.events_processed = events_processed;
    const auto n = static_cast<double>(r.trial_values.size());
    if (r.trial_values.empty()) {
        return r;
    }
    double sum = 0.0;
    for (double v : r.trial_values) {
        sum += v;
    }
    r.mean_aoi = sum / n;
    if (r.trial_values.size() > 1) {
        double ss = 0.0;
        for (double v : r.trial_values) {
            ss += (v - r.mean_aoi) * (v - r.mean_aoi);
        }
        r.stderr_aoi = std::sqrt(ss / (n - 1.0) / n);
    }
    r.ci95_halfwidth = 1.96 * r.stderr_aoi;
    return r;
}

SimResult simulate_two_sensor(const TwoSensorParams& params, const SimConfig& config,
                              const TraceSink& trace) {
    params.validate();
    config.validate();
    check_budget(config, params.lambda1 + params.lambda2 + params.mu1 + params.mu2);
    const std::vector<double> lambdas{params.lambda1, params.lambda2};
    const std::vector<double> mus{params.mu1, params.mu2};
    return run_trials(config, trace, [&](std::size_t k, const TraceSink* sink) {
        return run_blocking_trial(lambdas, mus, config, k, sink);
    });
}

SimResult simulate_mm11(double lambda, double mu, const SimConfig& config, const TraceSink& trace) {
    require_positive(lambda, "lambda");
    require_positive(mu, "mu");
    config.validate();
    check_budget(config, lambda + mu);
    const std::vector<double> lambdas{lambda};
    const std::vector<double> mus{mu};
    return run_trials(config, trace, [&](std::size_t k, const TraceSink* sink) {
        return run_blocking_trial(lambdas, mus, config, k, sink);
    });
}

SimResult simulate_mm2_preemptive(double lambda, double mu, const SimConfig& config,
                                  const TraceSink& trace) {
    require_positive(lambda, "lambda");
    require_positive(mu, "mu");
    config.validate();
    check_budget(config, lambda + 2.0 * mu);
    return run_trials(config, trace, [&](std::size_t k, const TraceSink* sink) {
        return run_mm2_preemptive_trial(lambda, mu, config, k, sink);
    });
}

}  // namespace aoi
