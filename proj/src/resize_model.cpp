#include "warmslice/resize_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace warmslice {

namespace {

constexpr double kUpMeanMs = 56.44;
constexpr double kUpStdMs = 8.53;
// Stress factors for the first two 100m intervals (incremental anchors).
constexpr double kStress1To100 = 6.06;
constexpr double kStress100To200 = 2.88;
// Down/StressCpu terminal anchor: mean + 2*std reaches ~3.95 s at the 1m
// target with the coefficient of variation held at the up-curve's value.
constexpr double kDownCpuTerminalMeanMs = 3033.0;
constexpr double kDownIdleTerminalMeanMs = 256.44;
constexpr double kCv = kUpStdMs / kUpMeanMs;

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// 100m grid below 1000m, 1000m grid above, plus the 1m end of the range.
const std::vector<int>& default_boundaries() {
    static const std::vector<int> b = [] {
        std::vector<int> v{1};
        for (int m = 100; m <= 900; m += 100) v.push_back(m);
        for (int m = 1000; m <= 8000; m += 1000) v.push_back(m);
        return v;
    }();
    return b;
}

double down_mean(LoadState load, int target) {
    const double terminal =
        load == LoadState::StressCpu ? kDownCpuTerminalMeanMs : kDownIdleTerminalMeanMs;
    return kUpMeanMs + (terminal - kUpMeanMs) / std::sqrt(static_cast<double>(target));
}

double up_stress_multiplier(LoadState load, int from, int to) {
    if (load != LoadState::StressCpu) return 1.0;
    if (from == 1 && to == 100) return kStress1To100;
    if (from == 100 && to == 200) return kStress100To200;
    return 1.0;
}

}  // namespace

std::string to_string(Direction d) { return d == Direction::Up ? "up" : "down"; }

std::string to_string(LoadState l) {
    switch (l) {
        case LoadState::Idle: return "idle";
        case LoadState::StressCpu: return "stress-cpu";
        case LoadState::StressIo: return "stress-io";
    }
    return "idle";
}

Direction direction_from_string(const std::string& s) {
    if (s == "up") return Direction::Up;
    if (s == "down") return Direction::Down;
    throw std::invalid_argument("unknown direction: " + s);
}

LoadState load_from_string(const std::string& s) {
    if (s == "idle") return LoadState::Idle;
    if (s == "stress-cpu") return LoadState::StressCpu;
    if (s == "stress-io") return LoadState::StressIo;
    throw std::invalid_argument("unknown load state: " + s);
}

ResizeLatencyTable ResizeLatencyTable::default_table() {
    ResizeLatencyTable t;
    t.floor_ms_ = 1.0;
    const auto& bounds = default_boundaries();
    for (LoadState load : {LoadState::Idle, LoadState::StressCpu, LoadState::StressIo}) {
        for (std::size_t i = 0; i < bounds.size(); ++i) {
            for (std::size_t j = 0; j < bounds.size(); ++j) {
                if (i == j) continue;
                const int from = bounds[i];
                const int to = bounds[j];
                BucketKey key;
                key.load = load;
                key.from_mcpu = from;
                key.to_mcpu = to;
                if (to > from) {
                    key.direction = Direction::Up;
                    const double mult = up_stress_multiplier(load, from, to);
                    t.entries_[key] = {kUpMeanMs * mult, kUpStdMs * mult};
                } else {
                    key.direction = Direction::Down;
                    const double mean = down_mean(load, to);
                    t.entries_[key] = {mean, mean * kCv};
                }
            }
        }
    }
    t.rebuild_boundaries();
    t.validate();
    return t;
}

void ResizeLatencyTable::rebuild_boundaries() {
    std::set<int> b;
    for (const auto& [key, stats] : entries_) {
        b.insert(key.from_mcpu);
        b.insert(key.to_mcpu);
    }
    boundaries_.assign(b.begin(), b.end());
}

int ResizeLatencyTable::snap(int mcpu) const {
    if (boundaries_.empty()) return mcpu;
    auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), mcpu);
    if (it == boundaries_.begin()) return boundaries_.front();
    return *std::prev(it);
}

int ResizeLatencyTable::snap_up(int mcpu) const {
    if (boundaries_.empty()) return mcpu;
    auto it = std::lower_bound(boundaries_.begin(), boundaries_.end(), mcpu);
    if (it == boundaries_.end()) return boundaries_.back();
    return *it;
}

// The pair snaps outward to the enclosing cell, so a within-cell resize
// (100m -> 105m) draws the full interval's statistics rather than
// degenerating to an identity. The fine 5m ladders depend on this.
BucketKey ResizeLatencyTable::interval_bucket(MilliCpu from, MilliCpu to, LoadState load) const {
    BucketKey key;
    key.load = load;
    if (from == to) {
        key.direction = Direction::Up;  // identity normalizes to Up
        key.from_mcpu = key.to_mcpu = snap(from.value);
    } else if (to.value > from.value) {
        key.direction = Direction::Up;
        key.from_mcpu = snap(from.value);
        key.to_mcpu = snap_up(to.value);
    } else {
        key.direction = Direction::Down;
        key.from_mcpu = snap_up(from.value);
        key.to_mcpu = snap(to.value);
    }
    return key;
}

LatencyStats ResizeLatencyTable::stats(const BucketKey& key) const {
    if (key.from_mcpu == key.to_mcpu) return {0.0, 0.0};
    auto it = entries_.find(key);
    if (it == entries_.end())
        throw CalibrationError("no calibration bucket for " + to_string(key.direction) + "/" +
                               to_string(key.load) + " " + std::to_string(key.from_mcpu) + "m->" +
                               std::to_string(key.to_mcpu) + "m");
    return it->second;
}

ResizeSample ResizeLatencyTable::sample(MilliCpu from, MilliCpu to, LoadState load,
                                        SeededRng& rng) const {
    ResizeSample s;
    s.bucket = interval_bucket(from, to, load);
    s.rng_draw_index = rng.draw_count();
    if (from == to) {
        s.latency_ms = 0.0;
        return s;
    }
    const LatencyStats st = stats(s.bucket);
    // Rejection sampling below the floor. The guard only triggers for
    // pathological calibrations whose mass sits almost entirely under the
    // floor; it keeps the draw sequence finite and deterministic.
    for (int tries = 0; tries < 64; ++tries) {
        const double x = rng.normal(st.mean_ms, st.std_ms);
        if (x >= floor_ms_) {
            s.latency_ms = x;
            return s;
        }
    }
    s.latency_ms = floor_ms_;
    return s;
}

void ResizeLatencyTable::validate() const {
    if (floor_ms_ < 0.0) throw CalibrationError("floor_ms must be >= 0");
    for (const auto& [key, st] : entries_) {
        const std::string where = to_string(key.direction) + "/" + to_string(key.load) + " " +
                                  std::to_string(key.from_mcpu) + "m->" +
                                  std::to_string(key.to_mcpu) + "m";
        if (st.mean_ms <= 0.0) throw CalibrationError("mean_ms must be > 0 at " + where);
        if (st.std_ms < 0.0) throw CalibrationError("std_ms must be >= 0 at " + where);
        if (key.direction == Direction::Up && key.from_mcpu >= key.to_mcpu)
            throw CalibrationError("up bucket must have from < to at " + where);
        if (key.direction == Direction::Down && key.from_mcpu <= key.to_mcpu)
            throw CalibrationError("down bucket must have from > to at " + where);
    }
    // Down means must be non-increasing as the target bucket grows, for a
    // fixed load, across all from-buckets.
    for (LoadState load : {LoadState::Idle, LoadState::StressCpu, LoadState::StressIo}) {
        std::map<int, std::pair<double, double>> by_target;  // to -> (min mean, max mean)
        for (const auto& [key, st] : entries_) {
            if (key.direction != Direction::Down || key.load != load) continue;
            auto [it, fresh] = by_target.try_emplace(key.to_mcpu, st.mean_ms, st.mean_ms);
            if (!fresh) {
                it->second.first = std::min(it->second.first, st.mean_ms);
                it->second.second = std::max(it->second.second, st.mean_ms);
            }
        }
        double running_max_above = -1.0;
        int above_target = -1;
        for (auto it = by_target.rbegin(); it != by_target.rend(); ++it) {
            const auto [target, mm] = *it;
            if (running_max_above >= 0.0 && mm.first < running_max_above)
                throw CalibrationError(
                    "down means must not increase with the target: " + to_string(load) +
                    " target " + std::to_string(target) + "m has mean " + fmt_double(mm.first) +
                    " < mean " + fmt_double(running_max_above) + " at target " +
                    std::to_string(above_target) + "m");
            if (mm.second > running_max_above) {
                running_max_above = mm.second;
                above_target = target;
            }
        }
    }
}

std::string ResizeLatencyTable::to_csv() const {
    std::string out = "direction,load,from_mcpu,to_mcpu,mean_ms,std_ms\n";
    out += "floor,,,," + fmt_double(floor_ms_) + ",\n";
    for (const auto& [key, st] : entries_) {
        out += to_string(key.direction) + "," + to_string(key.load) + "," +
               std::to_string(key.from_mcpu) + "," + std::to_string(key.to_mcpu) + "," +
               fmt_double(st.mean_ms) + "," + fmt_double(st.std_ms) + "\n";
    }
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, const char* what, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw FormatError(std::string("bad ") + what + " value '" + s + "'", line_no);
    }
}

int parse_int(const std::string& s, const char* what, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw FormatError(std::string("bad ") + what + " value '" + s + "'", line_no);
    }
}

}  // namespace

ResizeLatencyTable ResizeLatencyTable::from_csv(const std::string& text) {
    ResizeLatencyTable t;
    t.entries_.clear();
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    bool floor_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (split_csv_line(line) !=
                std::vector<std::string>{"direction", "load", "from_mcpu", "to_mcpu", "mean_ms",
                                         "std_ms"})
                throw FormatError("expected header direction,load,from_mcpu,to_mcpu,mean_ms,std_ms",
                                  line_no);
            header_seen = true;
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 6) throw FormatError("expected 6 fields", line_no);
        if (fields[0] == "floor") {
            t.floor_ms_ = parse_double(fields[4], "floor_ms", line_no);
            floor_seen = true;
            continue;
        }
        BucketKey key;
        try {
            key.direction = direction_from_string(fields[0]);
            key.load = load_from_string(fields[1]);
        } catch (const std::invalid_argument& e) {
            throw FormatError(e.what(), line_no);
        }
        key.from_mcpu = parse_int(fields[2], "from_mcpu", line_no);
        key.to_mcpu = parse_int(fields[3], "to_mcpu", line_no);
        LatencyStats st;
        st.mean_ms = parse_double(fields[4], "mean_ms", line_no);
        st.std_ms = parse_double(fields[5], "std_ms", line_no);
        if (t.entries_.count(key)) throw FormatError("duplicate bucket", line_no);
        t.entries_[key] = st;
    }
    if (!header_seen) throw FormatError("empty calibration document", line_no);
    if (t.entries_.empty()) throw FormatError("calibration has no buckets", line_no);
    if (!floor_seen) t.floor_ms_ = 1.0;
    t.rebuild_boundaries();
    t.validate();
    return t;
}

ResizeLatencyTable ResizeLatencyTable::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open calibration file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_csv(buf.str());
}

double truncated_normal_mean(double mean, double std_dev, double floor) {
    if (std_dev <= 0.0) return std::max(mean, floor);
    const double alpha = (floor - mean) / std_dev;
    const double phi = std::exp(-0.5 * alpha * alpha) / std::sqrt(2.0 * M_PI);
    const double tail = 0.5 * std::erfc(alpha / std::sqrt(2.0));
    if (tail <= 0.0) return floor;
    return mean + std_dev * phi / tail;
}

}  // namespace warmslice
