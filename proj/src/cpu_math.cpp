#include "warmslice/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace warmslice {

namespace {

// Generic water-fill: distribute `capacity` proportionally to `weights`,
// never exceeding per-instance `caps`; surplus from capped instances is
// re-shared among the rest until nobody moves.
Allocation water_fill(std::span<const MilliCpu> weights, std::span<const double> caps,
                      MilliCpu capacity) {
    if (weights.empty()) throw std::invalid_argument("cfs_allocate: empty limit list");

    const std::size_t n = weights.size();
    Allocation out;
    out.rates.assign(n, 0.0);

    double remaining = static_cast<double>(capacity.value);
    std::vector<std::size_t> active(n);
    std::iota(active.begin(), active.end(), 0);

    while (!active.empty() && remaining > 0.0) {
        double total_weight = 0.0;
        for (std::size_t i : active) total_weight += weights[i].value;

        double capped_sum = 0.0;
        std::vector<std::size_t> still_active;
        still_active.reserve(active.size());
        for (std::size_t i : active) {
            const double share = remaining * weights[i].value / total_weight;
            if (share >= caps[i] * (1.0 - 1e-12)) {
                out.rates[i] = caps[i];
                capped_sum += caps[i];
            } else {
                still_active.push_back(i);
            }
        }
        if (still_active.size() != active.size()) {
            remaining -= capped_sum;
            active = std::move(still_active);
            continue;
        }
        for (std::size_t i : active) out.rates[i] = remaining * weights[i].value / total_weight;
        remaining = 0.0;
        active.clear();
    }
    return out;
}

}  // namespace

Allocation cfs_allocate(std::span<const MilliCpu> limits, MilliCpu capacity) {
    std::vector<double> caps;
    caps.reserve(limits.size());
    for (MilliCpu l : limits) caps.push_back(static_cast<double>(l.value));
    return water_fill(limits, caps, capacity);
}

Allocation cfs_allocate_contended(std::span<const MilliCpu> weights, MilliCpu capacity) {
    std::vector<double> caps(weights.size(), std::numeric_limits<double>::infinity());
    return water_fill(weights, caps, capacity);
}

double task_duration_at(CpuWork work, double rate_mcpu) {
    if (rate_mcpu <= 0.0) throw std::invalid_argument("task_duration_at: rate must be > 0");
    return work.amount / rate_mcpu;
}

CpuWork advance_work(CpuWork remaining, double rate_mcpu, double dt_ms) {
    if (dt_ms < 0.0) throw std::invalid_argument("advance_work: dt must be >= 0");
    if (rate_mcpu < 0.0) throw std::invalid_argument("advance_work: rate must be >= 0");
    CpuWork out;
    out.amount = std::max(0.0, remaining.amount - rate_mcpu * dt_ms);
    return out;
}

double relative_latency(double policy_mean_ms, double default_mean_ms) {
    if (default_mean_ms <= 0.0)
        throw std::invalid_argument("relative_latency: baseline mean must be > 0");
    return policy_mean_ms / default_mean_ms;
}

}  // namespace warmslice
