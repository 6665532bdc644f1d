#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "warmslice/scenario.hpp"
#include "warmslice/trace.hpp"

namespace warmslice {

enum class EventKind { Arrival, ResizeApplied, ExecComplete, IdleExpiry, InstanceReady };

/// Queue entry of the virtual clock. Ties process in insertion order.
struct SimEvent {
    double at = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Arrival;
    int instance = -1;
    int vu = -1;
    int iteration = 0;
    std::uint64_t epoch = 0;  // lazy retraction of resize/completion events
};

/// One contiguous stretch of execution at a constant effective rate.
/// Integrating rate over a request's segments recovers its CPU work.
struct ExecSegment {
    int request_id = -1;
    int instance_id = -1;
    double t0 = 0.0;
    double t1 = 0.0;
    double rate_mcpu = 0.0;
};

struct RunResult {
    std::vector<TraceRecord> trace;
    std::vector<ExecSegment> segments;
    std::vector<std::string> notes;  // capacity errors, stale events
    std::uint64_t launches = 0;
    std::uint64_t capacity_errors = 0;
    std::uint64_t events_processed = 0;
};

/// Run one scenario to completion: processes events in (at, seq) order
/// until the arrival plan is exhausted and all in-flight work drains.
/// Whenever the fleet's CPU configuration changes, every busy instance's
/// remaining work is re-advanced under the water-filled rates and its
/// completion re-scheduled. Deterministic in (config, seed).
RunResult run_scenario(const ScenarioConfig& config);

}  // namespace warmslice
