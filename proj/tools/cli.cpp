#include "cli.hpp"

#include "aoi/errors.hpp"
#include "aoi/random.hpp"
#include "aoi/reference_chains.hpp"
#include "aoi/shs_json.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace aoi::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Options {
    std::optional<double> l1, l2, m1, m2, m;
    std::string method = "general";
    std::string model = "two_sensor";
    double horizon = 2e5;
    std::size_t trials = 10;
    std::uint64_t seed = 1;
    double warmup = 0.01;
    std::string format;
    std::string out;
    std::string trace;
    std::string l1_grid = "0.1:0.9:9";
    std::string m2_grid = "1:1.8:9";
    std::string lambda_grid = "0.2:5:12";
    bool with_sim = false;
};

double require(const std::optional<double>& value, const char* flag) {
    if (!value) {
        throw UsageError(std::string("missing required option ") + flag);
    }
    return *value;
}

std::optional<double> first_of(const std::optional<double>& a, const std::optional<double>& b) {
    return a ? a : b;
}

TwoSensorParams two_sensor_params(const Options& o) {
    TwoSensorParams p{require(o.l1, "--l1"), require(o.l2, "--l2"),
                      require(first_of(o.m1, o.m), "--m1 (or --m)"),
                      require(first_of(o.m2, o.m), "--m2 (or --m)")};
    try {
        p.validate();
    } catch (const ModelError& e) {
        throw UsageError(e.what());
    }
    return p;
}

void require_positive_rate(double value, const char* flag) {
    if (!std::isfinite(value) || value <= 0.0) {
        throw UsageError(std::string(flag) + " must be a positive rate");
    }
}

SimConfig sim_config(const Options& o) {
    SimConfig c;
    c.horizon = o.horizon;
    c.num_trials = o.trials;
    c.seed = o.seed;
    c.warmup = o.warmup;
    try {
        c.validate();
    } catch (const ModelError& e) {
        throw UsageError(e.what());
    }
    return c;
}

Format resolve_format(const Options& o, Format fallback) {
    if (o.format.empty()) {
        return fallback;
    }
    return o.format == "csv" ? Format::csv : Format::json;
}

// Writes to --out when given, otherwise to `out`.
void emit(const Options& o, std::ostream& out, const std::function<void(std::ostream&)>& body) {
    if (o.out.empty()) {
        body(out);
        return;
    }
    std::ofstream file(o.out, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot open output file " + o.out);
    }
    body(file);
    if (!file) {
        throw std::runtime_error("failed writing output file " + o.out);
    }
}

Json params_json(const TwoSensorParams& p) {
    return Json{{"lambda1", p.lambda1}, {"lambda2", p.lambda2}, {"mu1", p.mu1}, {"mu2", p.mu2}};
}

Json sim_json(const SimResult& r) {
    return Json{{"mean_aoi", r.mean_aoi},
                {"stderr", r.stderr_aoi},
                {"ci95_halfwidth", r.ci95_halfwidth},
                {"trial_values", r.trial_values},
                {"events_processed", r.events_processed}};
}

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

void cmd_theory(const Options& o, std::ostream& out) {
    const Format format = resolve_format(o, Format::json);
    Json doc;
    doc["method"] = o.method;

    if (o.method == "zero_wait") {
        const double mu = require(first_of(o.m, first_of(o.m1, o.m2)), "--m");
        require_positive_rate(mu, "--m");
        doc["mu"] = mu;
        doc["average_aoi"] = zero_wait_limit(mu);
    } else if (o.method == "eq17") {
        Options symmetric = o;
        symmetric.l2 = first_of(o.l2, o.l1);
        const auto p = two_sensor_params(symmetric);
        if (p.lambda1 != p.lambda2 || p.mu1 != p.mu2) {
            throw UsageError("method eq17 requires lambda1 == lambda2 and mu1 == mu2");
        }
        doc["params"] = params_json(p);
        doc["average_aoi"] = average_aoi_symmetric(p.lambda1, p.mu1);
    } else if (o.method == "eq16") {
        const auto p = two_sensor_params(o);
        if (p.mu1 != p.mu2) {
            throw UsageError("method eq16 requires mu1 == mu2");
        }
        doc["params"] = params_json(p);
        doc["average_aoi"] = average_aoi_equal_service(p.lambda1, p.lambda2, p.mu1);
    } else {
        const auto p = two_sensor_params(o);
        const auto b = average_aoi_general(p);
        if (format == Format::csv) {
            emit(o, out, [&](std::ostream& os) {
                os << "state,pi,v0,v1,v2\n";
                double totals[4] = {0, 0, 0, 0};
                for (std::size_t q = 0; q < b.stationary.size(); ++q) {
                    os << q << ',' << format_number(b.stationary[q]);
                    totals[0] += b.stationary[q];
                    for (std::size_t i = 0; i < 3; ++i) {
                        os << ',' << format_number(b.correlations.at(q, i));
                        totals[i + 1] += b.correlations.at(q, i);
                    }
                    os << '\n';
                }
                os << "total," << format_number(totals[0]) << ',' << format_number(b.average_aoi)
                   << ',' << format_number(totals[2]) << ',' << format_number(totals[3]) << '\n';
            });
            return;
        }
        doc["params"] = params_json(p);
        doc["average_aoi"] = b.average_aoi;
        doc["stationary"] = b.stationary.probs;
        Json rows = Json::array();
        for (std::size_t q = 0; q < b.correlations.num_states(); ++q) {
            const auto v = b.correlations.state(q);
            rows.push_back(std::vector<double>(v.begin(), v.end()));
        }
        doc["correlations"] = std::move(rows);
    }

    emit(o, out, [&](std::ostream& os) {
        if (format == Format::csv) {
            os << "method,average_aoi\n" << o.method << ',' << format_number(doc["average_aoi"].get<double>())
               << '\n';
        } else {
            os << doc.dump(2) << '\n';
        }
    });
}

void cmd_simulate(const Options& o, std::ostream& out) {
    const auto config = sim_config(o);

    std::ofstream trace_file;
    TraceSink sink;
    if (!o.trace.empty()) {
        trace_file.open(o.trace, std::ios::binary);
        if (!trace_file) {
            throw std::runtime_error("cannot open trace file " + o.trace);
        }
        trace_file << "time,event,sensor,generation_time,age\n";
        sink = [&trace_file](const TraceRecord& r) {
            trace_file << format_number(r.time) << ',' << to_string(r.event) << ',' << r.sensor << ','
                       << format_number(r.generation_time) << ',' << format_number(r.age) << '\n';
        };
    }

    Json doc;
    doc["model"] = o.model;
    SimResult result;
    double theory = 0.0;
    if (o.model == "two_sensor") {
        const auto p = two_sensor_params(o);
        doc["params"] = params_json(p);
        result = simulate_two_sensor(p, config, sink);
        theory = average_aoi_general(p).average_aoi;
    } else if (o.model == "mm11" || o.model == "mm2p") {
        const double lambda = require(o.l1, "--l1");
        const double mu = require(first_of(o.m1, o.m), "--m1 (or --m)");
        require_positive_rate(lambda, "--l1");
        require_positive_rate(mu, "--m1");
        doc["params"] = Json{{"lambda", lambda}, {"mu", mu}};
        if (o.model == "mm11") {
            result = simulate_mm11(lambda, mu, config, sink);
            theory = monitor_average_age(build_mm11_chain(lambda, mu));
        } else {
            result = simulate_mm2_preemptive(lambda, mu, config, sink);
            theory = monitor_average_age(build_mm2_preemptive_chain(lambda, mu));
        }
    } else {
        throw UsageError("unknown model '" + o.model + "' (expected two_sensor, mm11, or mm2p)");
    }

    doc["config"] = Json{{"horizon", config.horizon},
                         {"trials", config.num_trials},
                         {"seed", config.seed},
                         {"warmup", config.warmup}};
    const Json summary = sim_json(result);
    for (const auto& [key, value] : summary.items()) {
        doc[key] = value;
    }
    doc["theory"] = theory;
    doc["rel_gap"] = std::abs(result.mean_aoi - theory) / theory;

    emit(o, out, [&](std::ostream& os) {
        if (resolve_format(o, Format::json) == Format::csv) {
            os << "model,mean_aoi,stderr,ci95_halfwidth,events_processed,theory,rel_gap\n"
               << o.model << ',' << format_number(result.mean_aoi) << ','
               << format_number(result.stderr_aoi) << ',' << format_number(result.ci95_halfwidth)
               << ',' << result.events_processed << ',' << format_number(theory) << ','
               << format_number(doc["rel_gap"].get<double>()) << '\n';
        } else {
            os << doc.dump(2) << '\n';
        }
    });
}

Grid parse_grid(const std::string& text, const char* flag) {
    try {
        return Grid::parse(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string(flag) + ": " + e.what());
    }
}

void cmd_sweep(const Options& o, std::ostream& out) {
    SweepOptions s;
    s.lambda1 = parse_grid(o.l1_grid, "--l1-grid");
    s.mu2 = parse_grid(o.m2_grid, "--m2-grid");
    s.lambda2 = o.l2.value_or(0.8);
    s.mu1 = first_of(o.m1, o.m).value_or(1.0);
    require_positive_rate(s.lambda2, "--l2");
    require_positive_rate(s.mu1, "--m1");
    s.with_sim = o.with_sim;
    s.config = sim_config(o);
    const auto rows = sweep_fig3(s);
    emit(o, out, [&](std::ostream& os) { write_sweep(os, rows, resolve_format(o, Format::csv)); });
}

void cmd_compare(const Options& o, std::ostream& out) {
    const auto grid = parse_grid(o.lambda_grid, "--lambda-grid");
    const double mu = first_of(o.m, o.m1).value_or(1.0);
    require_positive_rate(mu, "--m");
    const auto rows = compare_fig4(grid, mu, sim_config(o));
    emit(o, out, [&](std::ostream& os) { write_fig4(os, rows, resolve_format(o, Format::csv)); });
}

void cmd_export(const Options& o, std::ostream& out) {
    Options filled = o;
    filled.l1 = o.l1.value_or(1.0);
    filled.l2 = o.l2.value_or(1.0);
    filled.m = o.m.value_or(1.0);
    const auto model = build_two_sensor_chain(two_sensor_params(filled));
    emit(o, out, [&](std::ostream& os) { os << model_to_json(model) << '\n'; });
}

}  // namespace

Grid Grid::parse(std::string_view text) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : text) {
        if (c == ':') {
            parts.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    parts.push_back(current);
    if (parts.size() != 3) {
        throw std::invalid_argument("grid must be start:stop:count, got '" + std::string(text) + "'");
    }
    Grid g;
    try {
        std::size_t used = 0;
        g.start = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument("start");
        g.stop = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("stop");
        const long long count = std::stoll(parts[2], &used);
        if (used != parts[2].size() || count < 1) throw std::invalid_argument("count");
        g.count = static_cast<std::size_t>(count);
    } catch (const std::exception&) {
        throw std::invalid_argument("grid must be start:stop:count with count >= 1, got '" +
                                    std::string(text) + "'");
    }
    if (!(g.start > 0.0) || !(g.stop > 0.0) || !std::isfinite(g.start) || !std::isfinite(g.stop)) {
        throw std::invalid_argument("grid rates must be positive, got '" + std::string(text) + "'");
    }
    return g;
}

std::vector<double> Grid::points() const {
    if (count == 1) {
        return {start};
    }
    std::vector<double> p(count);
    for (std::size_t k = 0; k < count; ++k) {
        p[k] = start + (stop - start) * static_cast<double>(k) / static_cast<double>(count - 1);
    }
    p.back() = stop;
    return p;
}

std::string format_number(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

std::uint64_t cell_seed(std::uint64_t root, std::size_t cell, std::size_t column) {
    return mix64(root ^ mix64(0x5EEDULL + 4 * static_cast<std::uint64_t>(cell) + column));
}

std::vector<ComparisonRow> sweep_fig3(const SweepOptions& options) {
    std::vector<ComparisonRow> rows;
    std::size_t cell = 0;
    for (double l1 : options.lambda1.points()) {
        for (double m2 : options.mu2.points()) {
            ComparisonRow row;
            row.params = {l1, options.lambda2, options.mu1, m2};
            row.theory = average_aoi_general(row.params).average_aoi;
            if (options.with_sim) {
                auto config = options.config;
                config.seed = cell_seed(options.config.seed, cell, 0);
                const auto sim = simulate_two_sensor(row.params, config);
                row.sim_mean = sim.mean_aoi;
                row.ci95 = sim.ci95_halfwidth;
                row.rel_gap = std::abs(sim.mean_aoi - *row.theory) / *row.theory;
            }
            rows.push_back(row);
            ++cell;
        }
    }
    return rows;
}

std::vector<Fig4Row> compare_fig4(const Grid& lambda, double mu, const SimConfig& config) {
    std::vector<Fig4Row> rows;
    std::size_t cell = 0;
    for (double l : lambda.points()) {
        Fig4Row row;
        row.lambda = l;
        const TwoSensorParams split{l / 2, l / 2, mu, mu};
        row.theory_two_sensor = average_aoi_general(split).average_aoi;

        auto c = config;
        c.seed = cell_seed(config.seed, cell, 0);
        row.sim_two_sensor = simulate_two_sensor(split, c);
        c.seed = cell_seed(config.seed, cell, 1);
        row.sim_mm11 = simulate_mm11(l, mu, c);
        c.seed = cell_seed(config.seed, cell, 2);
        row.sim_mm2p = simulate_mm2_preemptive(l, mu, c);
        rows.push_back(std::move(row));
        ++cell;
    }
    return rows;
}

void write_sweep(std::ostream& os, const std::vector<ComparisonRow>& rows, Format format) {
    if (format == Format::csv) {
        os << kSweepCsvHeader << '\n';
        for (const auto& r : rows) {
            os << format_number(r.params.lambda1) << ',' << format_number(r.params.lambda2) << ','
               << format_number(r.params.mu1) << ',' << format_number(r.params.mu2) << ','
               << optional_number(r.theory) << ',' << optional_number(r.sim_mean) << ','
               << optional_number(r.ci95) << ',' << optional_number(r.rel_gap) << '\n';
        }
        return;
    }
    Json doc = Json::array();
    for (const auto& r : rows) {
        doc.push_back(Json{{"lambda1", r.params.lambda1},
                           {"lambda2", r.params.lambda2},
                           {"mu1", r.params.mu1},
                           {"mu2", r.params.mu2},
                           {"theory", optional_json(r.theory)},
                           {"sim_mean", optional_json(r.sim_mean)},
                           {"ci95", optional_json(r.ci95)},
                           {"rel_gap", optional_json(r.rel_gap)}});
    }
    os << doc.dump(2) << '\n';
}

void write_fig4(std::ostream& os, const std::vector<Fig4Row>& rows, Format format) {
    if (format == Format::csv) {
        os << kFig4CsvHeader << '\n';
        for (const auto& r : rows) {
            os << format_number(r.lambda) << ',' << format_number(r.theory_two_sensor) << ','
               << format_number(r.sim_two_sensor.mean_aoi) << ','
               << format_number(r.sim_two_sensor.ci95_halfwidth) << ','
               << format_number(r.sim_mm11.mean_aoi) << ',' << format_number(r.sim_mm11.ci95_halfwidth)
               << ',' << format_number(r.sim_mm2p.mean_aoi) << ','
               << format_number(r.sim_mm2p.ci95_halfwidth) << '\n';
        }
        return;
    }
    Json doc = Json::array();
    for (const auto& r : rows) {
        doc.push_back(Json{{"lambda", r.lambda},
                           {"theory_two_sensor", r.theory_two_sensor},
                           {"sim_two_sensor", r.sim_two_sensor.mean_aoi},
                           {"ci_two_sensor", r.sim_two_sensor.ci95_halfwidth},
                           {"sim_mm11", r.sim_mm11.mean_aoi},
                           {"ci_mm11", r.sim_mm11.ci95_halfwidth},
                           {"sim_mm2p", r.sim_mm2p.mean_aoi},
                           {"ci_mm2p", r.sim_mm2p.ci95_halfwidth}});
    }
    os << doc.dump(2) << '\n';
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Average age of information for a two-sensor status-update system", "aoi_shs"};
    app.require_subcommand(1);
    Options o;

    auto add_rates = [&o](CLI::App* cmd) {
        cmd->add_option("--l1", o.l1, "Arrival rate of sensor 1");
        cmd->add_option("--l2", o.l2, "Arrival rate of sensor 2");
        cmd->add_option("--m1", o.m1, "Service rate of sensor 1");
        cmd->add_option("--m2", o.m2, "Service rate of sensor 2");
        cmd->add_option("--m", o.m, "Service rate of both sensors");
    };
    auto add_sim = [&o](CLI::App* cmd) {
        cmd->add_option("--horizon", o.horizon, "Simulated time per trial")->capture_default_str();
        cmd->add_option("--trials", o.trials, "Independent trials")->capture_default_str();
        cmd->add_option("--seed", o.seed, "Root seed")->capture_default_str();
        cmd->add_option("--warmup", o.warmup, "Fraction of the horizon excluded from the average")
            ->capture_default_str();
    };
    auto add_output = [&o](CLI::App* cmd) {
        cmd->add_option("--format", o.format, "Output format")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--out", o.out, "Output path (default: stdout)");
    };

    auto* theory = app.add_subcommand("theory", "Evaluate the average AoI analytically");
    add_rates(theory);
    add_output(theory);
    theory->add_option("--method", o.method, "general | eq16 | eq17 | zero_wait")
        ->check(CLI::IsMember({"general", "eq16", "eq17", "zero_wait"}))
        ->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "Run the event-driven simulator");
    add_rates(simulate);
    add_sim(simulate);
    add_output(simulate);
    simulate->add_option("--model", o.model, "two_sensor | mm11 | mm2p")->capture_default_str();
    simulate->add_option("--trace", o.trace, "Write trial 0's event trace as CSV");

    auto* sweep = app.add_subcommand("sweep-fig3", "Theory (and simulated) surface over lambda1 x mu2");
    add_rates(sweep);
    add_sim(sweep);
    add_output(sweep);
    sweep->add_option("--l1-grid", o.l1_grid, "lambda1 grid start:stop:count")->capture_default_str();
    sweep->add_option("--m2-grid", o.m2_grid, "mu2 grid start:stop:count")->capture_default_str();
    sweep->add_flag("--with-sim", o.with_sim, "Also simulate every cell");

    auto* compare = app.add_subcommand("compare-fig4", "Two sensors vs. M/M/1/1 vs. M/M/2 preemptive");
    add_rates(compare);
    add_sim(compare);
    add_output(compare);
    compare->add_option("--lambda-grid", o.lambda_grid, "Total arrival rate grid start:stop:count")
        ->capture_default_str();

    auto* export_model = app.add_subcommand("export-model", "Dump the two-sensor SHS chain as JSON");
    add_rates(export_model);
    export_model->add_option("--out", o.out, "Output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (theory->parsed()) {
            cmd_theory(o, out);
        } else if (simulate->parsed()) {
            cmd_simulate(o, out);
        } else if (sweep->parsed()) {
            cmd_sweep(o, out);
        } else if (compare->parsed()) {
            cmd_compare(o, out);
        } else if (export_model->parsed()) {
            cmd_export(o, out);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace aoi::cli
