#pragma once

// aoi_shs command-line front end. Everything except process setup lives here
// so the commands can be exercised in-process by tests.

#include "aoi/simulation.hpp"
#include "aoi/two_sensor.hpp"

#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aoi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Format { csv, json };

/// Inclusive, evenly spaced grid written "start:stop:count".
struct Grid {
    double start = 0.0;
    double stop = 0.0;
    std::size_t count = 1;

    static Grid parse(std::string_view text);
    std::vector<double> points() const;
};

/// One cell of a theory/simulation comparison.
struct ComparisonRow {
    TwoSensorParams params;
    std::optional<double> theory;
    std::optional<double> sim_mean;
    std::optional<double> ci95;
    /// |sim - theory| / theory when both are present.
    std::optional<double> rel_gap;
};

struct SweepOptions {
    Grid lambda1{0.1, 0.9, 9};
    Grid mu2{1.0, 1.8, 9};
    double lambda2 = 0.8;
    double mu1 = 1.0;
    bool with_sim = false;
    SimConfig config;
};

/// Theory surface (and optionally simulated surface) over lambda1 x mu2,
/// row-major in lambda1.
std::vector<ComparisonRow> sweep_fig3(const SweepOptions& options);

struct Fig4Row {
    double lambda;
    double theory_two_sensor;
    SimResult sim_two_sensor;
    SimResult sim_mm11;
    SimResult sim_mm2p;
};

/// Two sensors at lambda/2 each vs. one M/M/1/1 queue at lambda vs. the M/M/2
/// preemptive queue at lambda, all with service rate mu.
std::vector<Fig4Row> compare_fig4(const Grid& lambda, double mu, const SimConfig& config);

inline constexpr std::string_view kFig4CsvHeader =
    "lambda,theory_two_sensor,sim_two_sensor,ci_two_sensor,sim_mm11,ci_mm11,sim_mm2p,ci_mm2p";
inline constexpr std::string_view kSweepCsvHeader =
    "lambda1,lambda2,mu1,mu2,theory,sim_mean,ci95,rel_gap";

void write_sweep(std::ostream& os, const std::vector<ComparisonRow>& rows, Format format);
void write_fig4(std::ostream& os, const std::vector<Fig4Row>& rows, Format format);

/// Shortest round-trip decimal representation.
std::string format_number(double value);

/// Seed for an independent simulation of grid cell `cell`, column `column`.
std::uint64_t cell_seed(std::uint64_t root, std::size_t cell, std::size_t column);

/// Parses and runs one command. Returns kExitOk, kExitUsage, or kExitRuntime.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aoi::cli
