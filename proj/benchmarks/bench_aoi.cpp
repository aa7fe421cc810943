#include <benchmark/benchmark.h>

#include "aoi/reference_chains.hpp"
#include "aoi/simulation.hpp"
#include "aoi/two_sensor.hpp"

namespace {

const aoi::TwoSensorParams kParams{0.5, 0.8, 1.0, 1.4};

void BM_BuildChain(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(aoi::build_two_sensor_chain(kParams));
    }
}
BENCHMARK(BM_BuildChain);

void BM_GeneralSolve(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(aoi::average_aoi_general(kParams).average_aoi);
    }
}
BENCHMARK(BM_GeneralSolve);

void BM_StationaryClosedForm(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(aoi::stationary_closed_form(kParams));
    }
}
BENCHMARK(BM_StationaryClosedForm);

void BM_EqualServiceClosedForm(benchmark::State& state) {
    double l1 = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(l1);
        benchmark::DoNotOptimize(aoi::average_aoi_equal_service(l1, 0.8, 1.0));
    }
}
BENCHMARK(BM_EqualServiceClosedForm);

void BM_Mm11Solve(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(aoi::monitor_average_age(aoi::build_mm11_chain(1.0, 1.0)));
    }
}
BENCHMARK(BM_Mm11Solve);

void BM_SimulateTwoSensor(benchmark::State& state) {
    aoi::SimConfig config;
    config.horizon = static_cast<double>(state.range(0));
    config.num_trials = 1;
    std::uint64_t events = 0;
    for (auto _ : state) {
        const auto r = aoi::simulate_two_sensor(kParams, config);
        events += r.events_processed;
        benchmark::DoNotOptimize(r.mean_aoi);
    }
    state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateTwoSensor)->Arg(10000)->Arg(200000)->Unit(benchmark::kMillisecond);

void BM_SimulateMm2Preemptive(benchmark::State& state) {
    aoi::SimConfig config;
    config.horizon = 1e4;
    config.num_trials = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(aoi::simulate_mm2_preemptive(2.0, 1.0, config).mean_aoi);
    }
}
BENCHMARK(BM_SimulateMm2Preemptive)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
