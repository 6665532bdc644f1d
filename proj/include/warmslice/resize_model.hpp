#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "warmslice/rng.hpp"
#include "warmslice/units.hpp"

namespace warmslice {

enum class Direction { Up, Down };

/// Load state of the container whose limit is being patched.
enum class LoadState { Idle, StressCpu, StressIo };

std::string to_string(Direction d);
std::string to_string(LoadState l);
Direction direction_from_string(const std::string& s);
LoadState load_from_string(const std::string& s);

/// One cell of the (direction, load, from, to) partition. from_mcpu and
/// to_mcpu are partition boundary values, not raw configured values.
struct BucketKey {
    Direction direction = Direction::Up;
    LoadState load = LoadState::Idle;
    int from_mcpu = 1;
    int to_mcpu = 1;

    auto operator<=>(const BucketKey&) const = default;
};

struct LatencyStats {
    double mean_ms = 0.0;
    double std_ms = 0.0;

    bool operator==(const LatencyStats&) const = default;
};

/// One resize duration drawn from the table.
struct ResizeSample {
    double latency_ms = 0.0;
    BucketKey bucket;
    std::uint64_t rng_draw_index = 0;  // engine draws consumed before this sample
};

/// Calibrated distributions of in-place resize durations, keyed by
/// direction, container load, and the bucketized (from, to) interval.
///
/// Invariants: all means > 0, all stds >= 0, and for a fixed load the
/// Down means never increase as the target bucket grows (scaling toward
/// 1m is the slow end of the curve).
class ResizeLatencyTable {
public:
    /// Built-in calibration:
    ///   * Up at idle: mean 56.44 ms, std 8.53 ms for every interval (the
    ///     duration does not depend on the starting value).
    ///   * Up under CPU stress: 6.06x on the 1m->100m bucket, 2.88x on
    ///     100m->200m, 1x elsewhere.
    ///   * Down: mean rises toward small targets; under CPU stress the
    ///     1m-target bucket reaches ~3.95 s at mean + 2 std.
    ///   * I/O stress behaves like idle unless a calibration overrides it.
    /// Bucket boundaries: 100m steps below 1000m, 1000m steps above,
    /// up to 8000m. floor_ms = 1.
    static ResizeLatencyTable default_table();

    /// Parse a calibration CSV (same format to_csv emits). Rejects rows
    /// that fail to parse (FormatError with line number) and tables that
    /// break an invariant (CalibrationError naming the bucket).
    static ResizeLatencyTable from_csv(const std::string& text);
    static ResizeLatencyTable from_file(const std::string& path);

    /// Serialize as `direction,load,from_mcpu,to_mcpu,mean_ms,std_ms`
    /// rows plus a `floor,,,,<ms>,` pseudo-row. Round-trips exactly.
    std::string to_csv() const;

    /// Map a raw (from, to, load) to its bucket. The pair snaps outward to
    /// the partition cell enclosing it (lower end floors, upper end
    /// ceils), so within-cell resizes still draw a real interval;
    /// from == to yields the identity bucket. Total: never fails.
    BucketKey interval_bucket(MilliCpu from, MilliCpu to, LoadState load) const;

    /// Stats for a bucket; identity buckets are zero-latency. Throws
    /// CalibrationError for a non-identity bucket missing from the table.
    LatencyStats stats(const BucketKey& key) const;

    /// Draw one resize duration. Identity resizes cost 0; anything else is
    /// normal(mean, std) truncated below at floor_ms via rejection, so the
    /// population mean follows the truncated-normal expectation.
    ResizeSample sample(MilliCpu from, MilliCpu to, LoadState load, SeededRng& rng) const;

    double floor_ms() const { return floor_ms_; }
    std::size_t size() const { return entries_.size(); }
    const std::map<BucketKey, LatencyStats>& entries() const { return entries_; }

    bool operator==(const ResizeLatencyTable&) const = default;

private:
    void rebuild_boundaries();
    void validate() const;
    int snap(int mcpu) const;
    int snap_up(int mcpu) const;

    std::map<BucketKey, LatencyStats> entries_;
    std::vector<int> boundaries_;
    double floor_ms_ = 1.0;
};

/// Mean of a normal(mean, std) truncated below at `floor`; the target the
/// Monte-Carlo consistency checks use when the floor actually bites.
double truncated_normal_mean(double mean, double std_dev, double floor);

}  // namespace warmslice
