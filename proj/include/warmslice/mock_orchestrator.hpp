#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "warmslice/resize_model.hpp"
#include "warmslice/units.hpp"
#include "warmslice/workloads.hpp"

namespace warmslice {

struct PatchRecord {
    std::chrono::steady_clock::time_point dispatch_ts;
    MilliCpu target{1};
    double injected_latency_ms = 0.0;
};

struct WatchRecord {
    std::chrono::steady_clock::time_point detect_ts;
    MilliCpu observed{1};
    int poll_interval_us = 1000;
};

/// A fake container: one cpu.max-analog file holding an ASCII milliCPU
/// value. Patches are applied asynchronously after an injected latency by
/// a persistent worker thread; writes go through write-temp-then-rename
/// so a concurrent poller never sees a torn value. Patches on one
/// container are serialized.
class Container {
public:
    /// Creates `<workdir>/<id>.cpu.max` holding `initial`. Throws
    /// AlreadyExistsError for a duplicate id, IoError for an unwritable
    /// directory.
    static Container create(const std::string& id, MilliCpu initial,
                            const std::filesystem::path& workdir);

    Container(Container&&) noexcept;
    Container& operator=(Container&&) = delete;
    Container(const Container&) = delete;
    Container& operator=(const Container&) = delete;
    ~Container();

    const std::string& id() const;
    const std::filesystem::path& limit_file() const;

    /// Parse the current limit. Throws FormatError on an unparseable file
    /// (never happens through this API: writes are atomic).
    MilliCpu read_limit() const;

    /// Synchronous write, used for untimed resets.
    void set_limit_now(MilliCpu value);

    /// Dispatch a patch: returns immediately; the file flips to `to` after
    /// `injected_latency_ms` on the background worker.
    PatchRecord patch(MilliCpu to, double injected_latency_ms);

    /// Block until the most recent patch has been applied.
    void wait_applied();

private:
    struct Impl;
    explicit Container(std::unique_ptr<Impl> impl);

    std::unique_ptr<Impl> impl_;
};

/// Poll `handle`'s limit file every poll_interval_us until it reads `to`;
/// returns detect - dispatch in milliseconds. The measured duration
/// satisfies injected <= measured <= injected + poll interval + scheduling
/// slack. Throws WatchTimeout after timeout_ms.
double measure_resize(Container& handle, MilliCpu to, double injected_latency_ms,
                      int poll_interval_us, double timeout_ms = 30000.0);

struct StepMeasurement {
    int step_index = 0;
    MilliCpu from{1};
    MilliCpu to{1};
    int repetition = 0;
    double injected_ms = 0.0;
    double measured_ms = 0.0;
};

/// Where injected apply latencies come from: a fixed value or draws from a
/// calibration table.
using LatencySource = std::function<double(MilliCpu from, MilliCpu to)>;

LatencySource fixed_latency(double ms);
LatencySource sampled_latency(const ResizeLatencyTable& table, LoadState load, SeededRng& rng);

/// Execute every timed step of `plan` `repetitions` times against a fresh
/// container in `workdir`, measuring dispatch-to-visible durations.
/// Untimed reset steps (cumulative plans) are applied synchronously and
/// excluded from the output. A WatchTimeout is re-thrown with the step
/// identified.
std::vector<StepMeasurement> run_plan(const ResizePlan& plan, const LatencySource& latency,
                                      int poll_interval_us, int repetitions,
                                      const std::filesystem::path& workdir);

/// `plan_id,step_index,from_mcpu,to_mcpu,repetition,injected_ms,measured_ms`
std::string measurements_to_csv(const std::string& plan_id,
                                std::span<const StepMeasurement> rows);

}  // namespace warmslice
