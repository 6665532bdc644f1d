#pragma once

#include <optional>
#include <string>
#include <vector>

#include "warmslice/resize_model.hpp"
#include "warmslice/units.hpp"
#include "warmslice/workloads.hpp"

namespace warmslice {

enum class PolicyKind { Cold, Warm, InPlace, Default };

std::string to_string(PolicyKind k);
PolicyKind policy_from_string(const std::string& s);

struct PolicyConfig {
    PolicyKind kind = PolicyKind::Default;
    double stable_window_ms = 6000.0;  // scale-to-zero threshold
    int min_scale = 1;                 // Warm/Default ready floor
    MilliCpu park_cpu{1};              // InPlace deallocated level
    MilliCpu active_cpu{1000};         // serving allocation
    double cold_start_ms = 0.0;        // per-workload launch cost
    double platform_overhead_ms = 0.0; // per-request routing cost
    int parked_pool = 1;               // InPlace pre-created instances
    LoadState resize_load = LoadState::Idle;

    void validate() const;
};

/// Launch and routing overheads derived from the published relative
/// latencies: cold = (cold_ratio - warm_ratio) * runtime isolates the
/// launch cost, overhead = (warm_ratio - 1) * runtime isolates the
/// per-request platform cost. The default baseline carries neither.
PolicyConfig calibrated_config(PolicyKind kind, const WorkloadSpec& workload);

enum class Phase { Launching, Idle, Busy, ScalingUp, Parked, ScalingDown, Terminated };

std::string to_string(Phase p);

/// Lifecycle state of one function instance.
///   pending_target is present iff phase is ScalingUp/ScalingDown;
///   bound_request is present iff phase is Busy/ScalingUp;
///   Parked implies current_cpu == park_cpu, Idle implies active_cpu.
struct InstanceState {
    int id = 0;
    Phase phase = Phase::Idle;
    MilliCpu current_cpu{1000};
    std::optional<MilliCpu> pending_target;
    std::optional<double> idle_deadline;
    std::optional<int> bound_request;
};

struct Action {
    enum class Kind {
        LaunchInstance,     // create an instance for `request`, route on readiness
        RouteTo,            // bind `request` to `instance`
        DispatchResize,     // patch `instance` toward `target`
        ScheduleIdleExpiry, // arm the scale-down timer at `at`
        Terminate,          // remove `instance`
        Enqueue,            // park `request` in the FIFO
    };

    Kind kind;
    int instance = -1;
    int request = -1;
    MilliCpu target{1};
    double at = 0.0;
};

struct PolicyDecision {
    std::vector<Action> actions;
};

/// Route an arriving request. Cold/Warm reuse an idle instance when one
/// exists; Cold otherwise launches (paying the cold start), Warm beyond
/// its pool enqueues. InPlace claims a parked instance — dispatching the
/// up-resize and routing in the same breath, so execution starts at the
/// parked rate — and falls back to a launch when the pool is exhausted.
/// An instance still draining its down-patch counts as claimable: the new
/// patch supersedes the old one.
PolicyDecision on_arrival(const PolicyConfig& policy, const std::vector<InstanceState>& fleet,
                          int request, double now);

/// A resize patch became visible: ScalingUp -> Busy at the target rate,
/// ScalingDown -> Parked. Stale events (superseded patch, terminated
/// instance) produce no transition.
Phase phase_after_resize_applied(Phase current);

/// Task finished. Cold/Warm/Default idle the instance and arm the
/// stable-window timer; InPlace dispatches the down-resize. Down latency
/// is never part of any request's latency.
PolicyDecision on_exec_complete(const PolicyConfig& policy,
                                const std::vector<InstanceState>& fleet, int instance, double now);

/// Stable-window timer fired while idle. Cold scales to zero; Warm and
/// Default retain instances down to min_scale.
PolicyDecision on_idle_expiry(const PolicyConfig& policy, const std::vector<InstanceState>& fleet,
                              int instance, double now);

}  // namespace warmslice
