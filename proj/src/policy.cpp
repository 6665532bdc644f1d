#include "warmslice/policy.hpp"

#include <algorithm>

namespace warmslice {

std::string to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::Cold: return "cold";
        case PolicyKind::Warm: return "warm";
        case PolicyKind::InPlace: return "inplace";
        case PolicyKind::Default: return "default";
    }
    return "default";
}

PolicyKind policy_from_string(const std::string& s) {
    if (s == "cold") return PolicyKind::Cold;
    if (s == "warm") return PolicyKind::Warm;
    if (s == "inplace" || s == "in-place") return PolicyKind::InPlace;
    if (s == "default") return PolicyKind::Default;
    throw std::invalid_argument("unknown policy kind: " + s);
}

std::string to_string(Phase p) {
    switch (p) {
        case Phase::Launching: return "launching";
        case Phase::Idle: return "idle";
        case Phase::Busy: return "busy";
        case Phase::ScalingUp: return "scaling-up";
        case Phase::Parked: return "parked";
        case Phase::ScalingDown: return "scaling-down";
        case Phase::Terminated: return "terminated";
    }
    return "idle";
}

void PolicyConfig::validate() const {
    if (stable_window_ms <= 0.0) throw ValidationError("policy.stable_window_ms: must be > 0");
    if (min_scale < 1) throw ValidationError("policy.min_scale: must be >= 1");
    if (kind == PolicyKind::InPlace && park_cpu >= active_cpu)
        throw ValidationError("policy.park_cpu: must be < active_cpu");
    if (cold_start_ms < 0.0) throw ValidationError("policy.cold_start_ms: must be >= 0");
    if (platform_overhead_ms < 0.0)
        throw ValidationError("policy.platform_overhead_ms: must be >= 0");
    if (parked_pool < 1) throw ValidationError("policy.parked_pool: must be >= 1");
}

PolicyConfig calibrated_config(PolicyKind kind, const WorkloadSpec& workload) {
    PolicyConfig cfg;
    cfg.kind = kind;
    if (kind == PolicyKind::Default) return cfg;
    const ReferenceRatios& r = find_reference_ratios(workload.name);
    cfg.platform_overhead_ms = (r.warm - 1.0) * workload.runtime_at_1000m_ms;
    cfg.cold_start_ms = (r.cold - r.warm) * workload.runtime_at_1000m_ms;
    return cfg;
}

namespace {

const InstanceState* first_in_phase(const std::vector<InstanceState>& fleet, Phase phase) {
    const InstanceState* best = nullptr;
    for (const auto& inst : fleet)
        if (inst.phase == phase && (!best || inst.id < best->id)) best = &inst;
    return best;
}

int live_count(const std::vector<InstanceState>& fleet) {
    return static_cast<int>(
        std::count_if(fleet.begin(), fleet.end(),
                      [](const InstanceState& i) { return i.phase != Phase::Terminated; }));
}

}  // namespace

PolicyDecision on_arrival(const PolicyConfig& policy, const std::vector<InstanceState>& fleet,
                          int request, double) {
    PolicyDecision d;
    if (policy.kind == PolicyKind::InPlace) {
        const InstanceState* claim = first_in_phase(fleet, Phase::Parked);
        if (!claim) claim = first_in_phase(fleet, Phase::ScalingDown);
        if (claim) {
            d.actions.push_back(
                {Action::Kind::DispatchResize, claim->id, -1, policy.active_cpu, 0.0});
            d.actions.push_back({Action::Kind::RouteTo, claim->id, request, MilliCpu(1), 0.0});
            return d;
        }
        d.actions.push_back({Action::Kind::LaunchInstance, -1, request, policy.active_cpu, 0.0});
        return d;
    }

    if (const InstanceState* idle = first_in_phase(fleet, Phase::Idle)) {
        d.actions.push_back({Action::Kind::RouteTo, idle->id, request, MilliCpu(1), 0.0});
        return d;
    }
    if (policy.kind == PolicyKind::Cold) {
        d.actions.push_back({Action::Kind::LaunchInstance, -1, request, policy.active_cpu, 0.0});
        return d;
    }
    // Warm and Default keep a fixed pool; excess requests wait in FIFO order.
    d.actions.push_back({Action::Kind::Enqueue, -1, request, MilliCpu(1), 0.0});
    return d;
}

Phase phase_after_resize_applied(Phase current) {
    switch (current) {
        case Phase::ScalingUp: return Phase::Busy;
        case Phase::ScalingDown: return Phase::Parked;
        default: return current;  // stale event: no transition
    }
}

PolicyDecision on_exec_complete(const PolicyConfig& policy,
                                const std::vector<InstanceState>& fleet, int instance,
                                double now) {
    const auto it = std::find_if(fleet.begin(), fleet.end(),
                                 [&](const InstanceState& i) { return i.id == instance; });
    if (it == fleet.end() || !it->bound_request.has_value())
        throw ProtocolError("exec completion for unbound instance " + std::to_string(instance));

    PolicyDecision d;
    if (policy.kind == PolicyKind::InPlace) {
        d.actions.push_back({Action::Kind::DispatchResize, instance, -1, policy.park_cpu, 0.0});
    } else {
        d.actions.push_back({Action::Kind::ScheduleIdleExpiry, instance, -1, MilliCpu(1),
                             now + policy.stable_window_ms});
    }
    return d;
}

PolicyDecision on_idle_expiry(const PolicyConfig& policy, const std::vector<InstanceState>& fleet,
                              int instance, double) {
    PolicyDecision d;
    if (policy.kind == PolicyKind::Cold) {
        d.actions.push_back({Action::Kind::Terminate, instance, -1, MilliCpu(1), 0.0});
        return d;
    }
    if (policy.kind == PolicyKind::Warm || policy.kind == PolicyKind::Default) {
        if (live_count(fleet) > policy.min_scale)
            d.actions.push_back({Action::Kind::Terminate, instance, -1, MilliCpu(1), 0.0});
        return d;  // retained: the ready floor holds
    }
    return d;
}

}  // namespace warmslice
