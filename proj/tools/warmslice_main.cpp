// warmslice — scaling-policy laboratory CLI.
//
// Subcommands:
//   simulate     run a scenario, write trace CSV + summary JSON
//   resize-bench run stepped resize plans on the mock orchestrator
//   report       normalize policy summaries against a default baseline
//   plot-data    emit tidy (x, y, group) series for plotting
//
// Exit codes: 0 success, 1 usage/validation error, 2 runtime error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "warmslice/mock_orchestrator.hpp"
#include "warmslice/report.hpp"
#include "warmslice/scenario.hpp"
#include "warmslice/sim.hpp"

namespace fs = std::filesystem;
using namespace warmslice;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

std::string default_out_dir() {
    if (const char* env = std::getenv("WARMSLICE_OUT"); env && *env) return env;
    return ".";
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
}

std::string provenance(std::uint64_t seed) { return "# seed=" + std::to_string(seed) + "\n"; }

int cmd_simulate(const std::string& scenario_path, std::optional<std::uint64_t> seed_override,
                 const std::string& out_dir) {
    ScenarioConfig cfg = parse_scenario_file(scenario_path);
    if (seed_override) cfg.seed = *seed_override;

    std::vector<TraceRecord> pooled;
    for (int rep = 0; rep < cfg.replications; ++rep) {
        ScenarioConfig run_cfg = cfg;
        run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(rep);
        const RunResult result = run_scenario(run_cfg);
        const fs::path trace_path =
            fs::path(out_dir) /
            (cfg.replications == 1 ? "trace.csv" : "trace_r" + std::to_string(rep) + ".csv");
        write_file(trace_path, provenance(run_cfg.seed) + trace_to_csv(result.trace));
        for (const auto& note : result.notes) std::cerr << "note: " << note << "\n";
        pooled.insert(pooled.end(), result.trace.begin(), result.trace.end());
    }

    RunSummary summary;
    summary.workload = cfg.workload.name;
    summary.policy = cfg.policy.kind;
    summary.seed = cfg.seed;
    summary.replications = cfg.replications;
    summary.stats = summarize(pooled);
    write_file(fs::path(out_dir) / "summary.json", summary_to_json(summary));

    std::cout << "simulate: " << pooled.size() << " requests, mean " << summary.stats.mean_ms
              << " ms (" << to_string(cfg.policy.kind) << "/" << cfg.workload.name << ")\n";
    return kExitOk;
}

int cmd_resize_bench(const std::string& plan_selector, int poll_us, int reps,
                     const std::string& out_dir, const std::string& load_name,
                     std::optional<double> fixed_ms, const std::string& calibration,
                     std::uint64_t seed, bool literal_table2) {
    std::vector<ResizePlan> plans;
    if (plan_selector == "table2") {
        plans = table2_suite(literal_table2);
    } else if (plan_selector == "fine") {
        auto [up, down] = fine_plan();
        plans = {up, down};
    } else {
        plans = {plan_from_file(plan_selector)};
    }

    const ResizeLatencyTable table = calibration == "default"
                                         ? ResizeLatencyTable::default_table()
                                         : ResizeLatencyTable::from_file(calibration);
    const LoadState load = load_from_string(load_name);
    SeededRng rng(seed);
    const LatencySource source =
        fixed_ms ? fixed_latency(*fixed_ms) : sampled_latency(table, load, rng);

    const fs::path workdir = fs::path(out_dir) / "containers";
    for (const auto& plan : plans) {
        const auto rows = run_plan(plan, source, poll_us, reps, workdir);
        write_file(fs::path(out_dir) / (plan.id + ".csv"),
                   provenance(seed) + measurements_to_csv(plan.id, rows));
        std::cout << "resize-bench: " << plan.id << " -> " << rows.size() << " measurements\n";
    }
    return kExitOk;
}

int cmd_report(const std::vector<std::string>& baseline_paths,
               const std::vector<std::string>& input_paths, const std::string& out_dir,
               bool write_out) {
    std::vector<RunSummary> baselines, inputs;
    for (const auto& p : baseline_paths) baselines.push_back(summary_from_file(p));
    for (const auto& p : input_paths) inputs.push_back(summary_from_file(p));
    const auto rows = build_report(baselines, inputs);
    std::cout << report_to_text(rows);
    if (write_out) write_file(fs::path(out_dir) / "report.json", report_to_json(rows));
    return kExitOk;
}

int cmd_plot_data(const std::string& figure, const std::vector<std::string>& inputs,
                  const std::string& out_path) {
    static const std::map<std::string, std::string> interval_figures = {
        {"fig2a", "inc-up-100m"},   {"fig2b", "cum-up-100m"},   {"fig2c", "inc-down-100m"},
        {"fig2d", "cum-down-100m"}, {"fig3a", "inc-up-1000m"},  {"fig3b", "cum-up-1000m"},
        {"fig3c", "inc-down-1000m"}, {"fig3d", "cum-down-1000m"}, {"fig5a", "fine-up"},
        {"fig5b", "fine-down"},
    };

    if (inputs.empty()) throw ValidationError("plot-data: no inputs given");

    std::vector<PlotPoint> points;
    if (auto it = interval_figures.find(figure); it != interval_figures.end()) {
        for (const auto& path : inputs) {
            std::vector<MeasurementRow> rows;
            for (const auto& r : measurements_from_file(path))
                if (r.plan_id == it->second) rows.push_back(r);
            if (rows.empty()) continue;
            std::string group = fs::path(path).stem().string();
            for (auto& p : interval_mean_series(rows, group)) points.push_back(std::move(p));
        }
        if (points.empty())
            throw ValidationError("plot-data: no rows for plan " + it->second + " in the inputs");
    } else if (figure == "fig6") {
        std::vector<RunSummary> summaries;
        for (const auto& path : inputs) summaries.push_back(summary_from_file(path));
        points = policy_mean_series(summaries);
    } else if (figure == "fig7") {
        std::vector<ReportRow> rows;
        for (const auto& path : inputs) {
            std::ifstream in(path);
            if (!in) throw IoError("cannot open " + path);
            std::ostringstream buf;
            buf << in.rdbuf();
            for (auto& r : report_from_json(buf.str())) rows.push_back(std::move(r));
        }
        points = runtime_vs_inplace_series(rows);
    } else {
        throw ValidationError(
            "plot-data: unknown figure '" + figure +
            "'; valid: fig2a-fig2d, fig3a-fig3d, fig5a, fig5b, fig6, fig7");
    }

    write_file(out_path, plot_to_csv(points));
    std::cout << "plot-data: " << points.size() << " points -> " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"warmslice: serverless scaling-policy laboratory"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run a scenario");
    std::string scenario_path;
    std::uint64_t seed_value = 0;
    std::string out_dir = default_out_dir();
    simulate->add_option("--scenario", scenario_path, "scenario JSON path")->required();
    auto* seed_opt = simulate->add_option("--seed", seed_value, "seed override");
    simulate->add_option("--out", out_dir, "output directory");

    // resize-bench
    auto* bench = app.add_subcommand("resize-bench", "measure resize plans on the mock orchestrator");
    std::string plan_selector = "table2";
    int poll_us = 1000;
    int reps = 5;
    std::string bench_out = default_out_dir();
    std::string load_name = "idle";
    double fixed_ms_value = 0.0;
    std::string calibration = "default";
    std::uint64_t bench_seed = 42;
    bool literal_table2 = false;
    bench->add_option("--plan", plan_selector, "table2 | fine | <plan csv path>")->required();
    bench->add_option("--poll-us", poll_us, "watcher poll interval (us)");
    bench->add_option("--reps", reps, "repetitions per timed step");
    bench->add_option("--out", bench_out, "output directory");
    bench->add_option("--load", load_name, "idle | stress-cpu | stress-io");
    auto* fixed_opt = bench->add_option("--fixed-ms", fixed_ms_value,
                                        "inject a fixed apply latency instead of sampling");
    bench->add_option("--calibration", calibration, "default | <calibration csv path>");
    bench->add_option("--seed", bench_seed, "sampling seed");
    bench->add_flag("--table2-literal", literal_table2,
                    "use the published 1000m->1m endpoints for the cumulative/down/100m row");

    // report
    auto* report = app.add_subcommand("report", "normalized relative-latency table");
    std::vector<std::string> baseline_paths, input_paths;
    std::string report_out = default_out_dir();
    report->add_option("--baseline", baseline_paths, "default-policy summary JSON(s)")->required();
    report->add_option("--inputs", input_paths, "policy summary JSONs")->required();
    auto* report_out_opt = report->add_option("--out", report_out, "directory for report.json");

    // plot-data
    auto* plot = app.add_subcommand("plot-data", "emit tidy plot series");
    std::string figure;
    std::vector<std::string> plot_inputs;
    std::string plot_out;
    plot->add_option("--figure", figure, "fig2a-d | fig3a-d | fig5a | fig5b | fig6 | fig7")
        ->required();
    plot->add_option("--inputs", plot_inputs, "input CSV/JSON files")->required();
    plot->add_option("--out", plot_out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate->parsed()) {
            std::optional<std::uint64_t> seed_override;
            if (seed_opt->count() > 0) seed_override = seed_value;
            return cmd_simulate(scenario_path, seed_override, out_dir);
        }
        if (bench->parsed()) {
            std::optional<double> fixed;
            if (fixed_opt->count() > 0) fixed = fixed_ms_value;
            return cmd_resize_bench(plan_selector, poll_us, reps, bench_out, load_name, fixed,
                                    calibration, bench_seed, literal_table2);
        }
        if (report->parsed())
            return cmd_report(baseline_paths, input_paths, report_out, report_out_opt->count() > 0);
        if (plot->parsed()) return cmd_plot_data(figure, plot_inputs, plot_out);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NotFoundError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
