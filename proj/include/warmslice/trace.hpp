#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "warmslice/policy.hpp"

namespace warmslice {

/// Per-request timing decomposition. All times are virtual milliseconds.
/// Invariant: arrival <= route <= exec_start <= completion, and
/// resize_dispatch <= resize_applied when present. `completion` includes
/// the platform overhead on the response path.
struct TraceRecord {
    int request_id = 0;
    std::string workload;
    PolicyKind policy = PolicyKind::Default;
    double arrival_ms = 0.0;
    double route_ms = 0.0;
    std::optional<double> resize_dispatch_ms;
    std::optional<double> resize_applied_ms;
    double exec_start_ms = 0.0;
    std::optional<double> completion_ms;
    int instance_id = -1;
    bool cold_start = false;
};

/// End-to-end latency of a completed request (completion - arrival).
/// Throws NotFinished for a request that has not completed.
double request_latency(const TraceRecord& row);

/// Exact column set:
/// request_id,workload,policy,arrival_ms,route_ms,resize_dispatch_ms,
/// resize_applied_ms,exec_start_ms,completion_ms,instance_id,cold_start
/// Empty optionals serialize as empty fields.
std::string trace_to_csv(std::span<const TraceRecord> trace);

struct SummaryStats {
    std::size_t count = 0;
    double mean_ms = 0.0;
    double std_ms = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
    double p99 = 0.0;
    std::optional<double> relative_to_baseline;
};

/// Latency statistics over completed requests; the ratio column is filled
/// when a baseline mean is supplied. Throws std::invalid_argument on an
/// empty trace.
SummaryStats summarize(std::span<const TraceRecord> trace,
                       std::optional<double> baseline_mean_ms = std::nullopt);

}  // namespace warmslice
