#pragma once

#include <compare>
#include <span>
#include <string>
#include <vector>

#include "warmslice/errors.hpp"

namespace warmslice {

/// Integer CPU quantity in milliCPU. 1000m = 1 CPU. The smallest
/// configurable value is 1m.
struct MilliCpu {
    int value = 1;

    MilliCpu() = default;
    explicit MilliCpu(int v) : value(v) {
        if (v < 1) throw std::invalid_argument("MilliCpu must be >= 1m, got " + std::to_string(v));
    }

    auto operator<=>(const MilliCpu&) const = default;
};

inline MilliCpu operator"" _mcpu(unsigned long long v) { return MilliCpu(static_cast<int>(v)); }

/// Outstanding CPU work in milliCPU-milliseconds. A task is complete
/// exactly when amount reaches 0.
struct CpuWork {
    double amount = 0.0;

    CpuWork() = default;
    explicit CpuWork(double a) : amount(a) {
        if (a < 0.0) throw std::invalid_argument("CpuWork must be >= 0");
    }
};

/// A function's cost model: the measured runtime at 1000m and the CPU
/// work that runtime implies under the linear model (work = runtime * 1000m).
struct WorkloadSpec {
    std::string name;
    double runtime_at_1000m_ms = 0.0;
    CpuWork work;
    double cpu_bound_fraction = 1.0;  // reserved for non-scalable floors
};

inline WorkloadSpec make_workload(std::string name, double runtime_at_1000m_ms) {
    if (runtime_at_1000m_ms <= 0.0)
        throw std::invalid_argument("workload runtime must be > 0 ms");
    return WorkloadSpec{std::move(name), runtime_at_1000m_ms,
                        CpuWork(runtime_at_1000m_ms * 1000.0), 1.0};
}

/// Single-node capacity. Default is an 8-core node.
struct NodeSpec {
    MilliCpu capacity{8000};

    NodeSpec() = default;
    explicit NodeSpec(MilliCpu cap) : capacity(cap) {
        if (cap.value < 1000)
            throw std::invalid_argument("node capacity must be >= 1000m");
    }
};

/// Per-instance effective CPU rates. Rates are fractional milliCPU:
/// proportional shares (e.g. two thirds of a node) are not integral.
struct Allocation {
    std::vector<double> rates;

    double total() const {
        double s = 0.0;
        for (double r : rates) s += r;
        return s;
    }
};

/// Water-filling CFS allocation. Each limit acts both as the instance's
/// share weight and as its demand cap: under-subscription hands every
/// instance its limit, over-subscription splits capacity proportionally,
/// re-distributing surplus from capped instances until fixpoint.
/// Sum of rates == min(sum limits, capacity).
Allocation cfs_allocate(std::span<const MilliCpu> limits, MilliCpu capacity);

/// Full-contention variant: every instance is an unbounded demander and
/// the limits act purely as CFS weights, so two instances at 100m and 50m
/// split the node 2/3 : 1/3 regardless of capacity.
Allocation cfs_allocate_contended(std::span<const MilliCpu> weights, MilliCpu capacity);

/// Time to drain `work` at a constant effective rate, in milliseconds.
double task_duration_at(CpuWork work, double rate_mcpu);

/// Work left after running dt milliseconds at `rate_mcpu`. Clamps at zero.
CpuWork advance_work(CpuWork remaining, double rate_mcpu, double dt_ms);

/// Normalized latency: policy mean over baseline mean.
double relative_latency(double policy_mean_ms, double default_mean_ms);

}  // namespace warmslice
