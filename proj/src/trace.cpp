#include "warmslice/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace warmslice {

namespace {

std::string fmt_ms(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_ms(*v) : std::string(); }

double percentile(const std::vector<double>& sorted, double q) {
    // nearest-rank: the ceil(q*n)-th smallest value
    const std::size_t n = sorted.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[rank - 1];
}

}  // namespace

double request_latency(const TraceRecord& row) {
    if (!row.completion_ms)
        throw NotFinished("request " + std::to_string(row.request_id) + " has not completed");
    return *row.completion_ms - row.arrival_ms;
}

std::string trace_to_csv(std::span<const TraceRecord> trace) {
    std::string out =
        "request_id,workload,policy,arrival_ms,route_ms,resize_dispatch_ms,resize_applied_ms,"
        "exec_start_ms,completion_ms,instance_id,cold_start\n";
    for (const auto& r : trace) {
        out += std::to_string(r.request_id) + "," + r.workload + "," + to_string(r.policy) + "," +
               fmt_ms(r.arrival_ms) + "," + fmt_ms(r.route_ms) + "," +
               fmt_opt(r.resize_dispatch_ms) + "," + fmt_opt(r.resize_applied_ms) + "," +
               fmt_ms(r.exec_start_ms) + "," + fmt_opt(r.completion_ms) + "," +
               std::to_string(r.instance_id) + "," + (r.cold_start ? "true" : "false") + "\n";
    }
    return out;
}

SummaryStats summarize(std::span<const TraceRecord> trace,
                       std::optional<double> baseline_mean_ms) {
    if (trace.empty()) throw std::invalid_argument("summarize: empty trace");

    std::vector<double> lat;
    lat.reserve(trace.size());
    for (const auto& r : trace) lat.push_back(request_latency(r));
    std::sort(lat.begin(), lat.end());

    SummaryStats s;
    s.count = lat.size();
    double sum = 0.0;
    for (double v : lat) sum += v;
    s.mean_ms = sum / static_cast<double>(lat.size());
    double ss = 0.0;
    for (double v : lat) ss += (v - s.mean_ms) * (v - s.mean_ms);
    s.std_ms = std::sqrt(ss / static_cast<double>(lat.size()));
    s.p50 = percentile(lat, 0.50);
    s.p95 = percentile(lat, 0.95);
    s.p99 = percentile(lat, 0.99);
    if (baseline_mean_ms) s.relative_to_baseline = relative_latency(s.mean_ms, *baseline_mean_ms);
    return s;
}

}  // namespace warmslice
