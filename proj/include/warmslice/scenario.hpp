#pragma once

#include <cstdint>
#include <string>

#include "warmslice/policy.hpp"
#include "warmslice/resize_model.hpp"
#include "warmslice/units.hpp"
#include "warmslice/workloads.hpp"

namespace warmslice {

/// One simulation run: node, policy, workload, driver, calibration, seed.
struct ScenarioConfig {
    NodeSpec node;
    PolicyConfig policy;
    WorkloadSpec workload;
    ArrivalPlan driver;
    ResizeLatencyTable calibration = ResizeLatencyTable::default_table();
    std::string calibration_source = "default";
    std::uint64_t seed = 42;
    int replications = 1;

    void validate() const;
};

/// Convenience constructor with the calibrated per-workload overheads.
ScenarioConfig make_scenario(PolicyKind kind, const std::string& workload_name,
                             ArrivalPlan driver, std::uint64_t seed = 42);

/// Parse and validate a scenario JSON document. Unknown keys are rejected
/// with their path; invariant violations name the offending field.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig parse_scenario_file(const std::string& path);

}  // namespace warmslice
