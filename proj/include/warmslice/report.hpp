#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "warmslice/policy.hpp"
#include "warmslice/trace.hpp"

namespace warmslice {

/// One simulate run's statistics, as persisted in summary JSON.
struct RunSummary {
    std::string workload;
    PolicyKind policy = PolicyKind::Default;
    std::uint64_t seed = 42;
    int replications = 1;
    SummaryStats stats;
};

std::string summary_to_json(const RunSummary& s);
RunSummary summary_from_json(const std::string& text);
RunSummary summary_from_file(const std::string& path);

/// One row of the normalized latency table. Missing policies stay NaN.
struct ReportRow {
    std::string workload;
    double cold_ratio = std::numeric_limits<double>::quiet_NaN();
    double inplace_ratio = std::numeric_limits<double>::quiet_NaN();
    double warm_ratio = std::numeric_limits<double>::quiet_NaN();
    double default_ratio = 1.0;
};

/// Normalize policy means against the default baseline, workload by
/// workload. Throws ValidationError when an input's workload has no
/// baseline or a baseline mean is not positive.
std::vector<ReportRow> build_report(const std::vector<RunSummary>& baselines,
                                    const std::vector<RunSummary>& inputs);

std::string report_to_text(const std::vector<ReportRow>& rows);
std::string report_to_json(const std::vector<ReportRow>& rows);
std::vector<ReportRow> report_from_json(const std::string& text);

/// Tidy plot series point: x is kept textual so categorical axes
/// (policy names) and numeric ones (milliCPU, runtime) share a schema.
struct PlotPoint {
    std::string x;
    double y = 0.0;
    std::string group;
};

std::string plot_to_csv(std::span<const PlotPoint> points);

/// Parsed measurement CSV row (the resize bench output format).
struct MeasurementRow {
    std::string plan_id;
    int step_index = 0;
    int from_mcpu = 1;
    int to_mcpu = 1;
    int repetition = 0;
    double injected_ms = 0.0;
    double measured_ms = 0.0;
};

std::vector<MeasurementRow> measurements_from_csv(const std::string& text);
std::vector<MeasurementRow> measurements_from_file(const std::string& path);

/// Per-target mean measured duration, grouped under `group`; the series
/// behind the per-interval and fine-grained latency figures.
std::vector<PlotPoint> interval_mean_series(const std::vector<MeasurementRow>& rows,
                                            const std::string& group);

/// (policy, mean latency) series per workload from run summaries.
std::vector<PlotPoint> policy_mean_series(const std::vector<RunSummary>& summaries);

/// (runtime_ms, inplace_ratio) series from a normalized report.
std::vector<PlotPoint> runtime_vs_inplace_series(const std::vector<ReportRow>& rows);

}  // namespace warmslice
