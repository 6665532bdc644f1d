#pragma once

#include <string>
#include <utility>
#include <vector>

#include "warmslice/resize_model.hpp"
#include "warmslice/units.hpp"

namespace warmslice {

/// The built-in function catalog: measured runtimes at 1000m.
const std::vector<WorkloadSpec>& catalog();

/// Catalog lookup; throws NotFoundError for unknown names.
const WorkloadSpec& find_workload(const std::string& name);

/// Published relative latencies per policy, normalized to the default
/// baseline. Used to calibrate per-workload launch and routing overheads.
struct ReferenceRatios {
    double cold = 1.0;
    double inplace = 1.0;
    double warm = 1.0;
};

const std::vector<std::pair<std::string, ReferenceRatios>>& reference_ratios();
const ReferenceRatios& find_reference_ratios(const std::string& workload);

enum class Pattern { Incremental, Cumulative };

std::string to_string(Pattern p);
Pattern pattern_from_string(const std::string& s);

struct ResizeStep {
    int index = 0;
    MilliCpu from{1};
    MilliCpu to{1};
    bool timed = true;  // cumulative reset steps run untimed
};

/// A stepped resize experiment. Incremental chains each step off the
/// previous value; cumulative starts every timed step from `initial`,
/// with untimed resets in between.
struct ResizePlan {
    std::string id;
    MilliCpu step_size{100};
    Pattern pattern = Pattern::Incremental;
    Direction direction = Direction::Up;
    MilliCpu initial{1};
    MilliCpu target{1000};
    std::vector<ResizeStep> steps;

    std::vector<ResizeStep> timed_steps() const;
};

/// Build a stepped plan. Step boundaries sit on multiples of `step`, so a
/// plan starting at 1m with 100m steps first lands on 100m; downward plans
/// ending at 1m take a final short step from the lowest boundary.
ResizePlan resize_plan(MilliCpu step, Pattern pattern, Direction direction, MilliCpu initial,
                       MilliCpu target);

/// 5m-granularity incremental ladders: 5m -> 1000m and back.
std::pair<ResizePlan, ResizePlan> fine_plan();

/// The eight stepped-resize configurations (incremental/cumulative x
/// up/down x 100m/1000m steps). By default the cumulative/down/100m row
/// uses the 100m -> 1m endpoints the measured data shows;
/// `literal_endpoints` switches it to the published 1000m -> 1m row.
std::vector<ResizePlan> table2_suite(bool literal_endpoints = false);

/// `step_index,from_mcpu,to_mcpu,timed` serialization.
std::string plan_to_csv(const ResizePlan& plan);
ResizePlan plan_from_csv(const std::string& text, const std::string& id = "custom");
ResizePlan plan_from_file(const std::string& path);

/// Driver for a simulated load: closed-loop virtual users (each emits its
/// next request only after the previous response, plus optional think
/// time) or an open Poisson process.
struct ArrivalPlan {
    enum class Mode { ClosedLoop, Poisson };

    Mode mode = Mode::ClosedLoop;
    std::string workload;
    // closed loop
    int vus = 1;
    int iterations = 50;
    double think_ms = 0.0;
    // poisson
    double rate_rps = 0.0;
    double horizon_ms = 0.0;

    void validate() const;
};

}  // namespace warmslice
