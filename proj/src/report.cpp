#include "warmslice/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "warmslice/workloads.hpp"

namespace warmslice {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string fmt2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// Catalog workloads first, in catalog order; everything else after,
// alphabetically, so reports line up with the published table layout.
int workload_order(const std::string& name) {
    const auto& c = catalog();
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i].name == name) return static_cast<int>(i);
    return static_cast<int>(c.size());
}

}  // namespace

std::string summary_to_json(const RunSummary& s) {
    json j;
    j["workload"] = s.workload;
    j["policy"] = to_string(s.policy);
    j["seed"] = s.seed;
    j["replications"] = s.replications;
    j["count"] = s.stats.count;
    j["mean_ms"] = s.stats.mean_ms;
    j["std_ms"] = s.stats.std_ms;
    j["p50_ms"] = s.stats.p50;
    j["p95_ms"] = s.stats.p95;
    j["p99_ms"] = s.stats.p99;
    if (s.stats.relative_to_baseline) j["relative_to_baseline"] = *s.stats.relative_to_baseline;
    return j.dump(2) + "\n";
}

RunSummary summary_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("summary: not valid JSON: ") + e.what());
    }
    RunSummary s;
    try {
        s.workload = j.at("workload").get<std::string>();
        s.policy = policy_from_string(j.at("policy").get<std::string>());
        s.seed = j.value("seed", 42ull);
        s.replications = j.value("replications", 1);
        s.stats.count = j.at("count").get<std::size_t>();
        s.stats.mean_ms = j.at("mean_ms").get<double>();
        s.stats.std_ms = j.value("std_ms", 0.0);
        s.stats.p50 = j.value("p50_ms", 0.0);
        s.stats.p95 = j.value("p95_ms", 0.0);
        s.stats.p99 = j.value("p99_ms", 0.0);
        if (j.contains("relative_to_baseline"))
            s.stats.relative_to_baseline = j["relative_to_baseline"].get<double>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("summary: ") + e.what());
    }
    return s;
}

RunSummary summary_from_file(const std::string& path) { return summary_from_json(read_file(path)); }

std::vector<ReportRow> build_report(const std::vector<RunSummary>& baselines,
                                    const std::vector<RunSummary>& inputs) {
    std::map<std::string, double> baseline_means;
    for (const auto& b : baselines) {
        if (b.policy != PolicyKind::Default)
            throw ValidationError("report baseline must be a default-policy summary (got " +
                                  to_string(b.policy) + " for " + b.workload + ")");
        if (b.stats.mean_ms <= 0.0)
            throw ValidationError("baseline mean for " + b.workload + " must be > 0");
        baseline_means[b.workload] = b.stats.mean_ms;
    }

    std::map<std::string, ReportRow> rows;
    for (const auto& in : inputs) {
        auto base = baseline_means.find(in.workload);
        if (base == baseline_means.end())
            throw ValidationError("no baseline for workload " + in.workload);
        auto [it, fresh] = rows.try_emplace(in.workload);
        if (fresh) it->second.workload = in.workload;
        const double ratio = relative_latency(in.stats.mean_ms, base->second);
        switch (in.policy) {
            case PolicyKind::Cold: it->second.cold_ratio = ratio; break;
            case PolicyKind::InPlace: it->second.inplace_ratio = ratio; break;
            case PolicyKind::Warm: it->second.warm_ratio = ratio; break;
            case PolicyKind::Default: it->second.default_ratio = ratio; break;
        }
    }

    std::vector<ReportRow> out;
    out.reserve(rows.size());
    for (auto& [name, row] : rows) out.push_back(std::move(row));
    std::sort(out.begin(), out.end(), [](const ReportRow& a, const ReportRow& b) {
        const int oa = workload_order(a.workload), ob = workload_order(b.workload);
        return oa != ob ? oa < ob : a.workload < b.workload;
    });
    return out;
}

std::string report_to_text(const std::vector<ReportRow>& rows) {
    std::size_t name_w = 8;
    for (const auto& r : rows) name_w = std::max(name_w, r.workload.size());
    std::ostringstream out;
    out << std::string(name_w - 8, ' ') << "workload" << "      cold  in-place      warm   default\n";
    for (const auto& r : rows) {
        auto cell = [](double v) {
            std::string s = std::isnan(v) ? "-" : fmt2(v);
            return std::string(10 - std::min<std::size_t>(10, s.size()), ' ') + s;
        };
        out << std::string(name_w - r.workload.size(), ' ') << r.workload << cell(r.cold_ratio)
            << cell(r.inplace_ratio) << cell(r.warm_ratio) << cell(r.default_ratio) << "\n";
    }
    return out.str();
}

std::string report_to_json(const std::vector<ReportRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        json j;
        j["workload"] = r.workload;
        j["cold"] = std::isnan(r.cold_ratio) ? json() : json(r.cold_ratio);
        j["inplace"] = std::isnan(r.inplace_ratio) ? json() : json(r.inplace_ratio);
        j["warm"] = std::isnan(r.warm_ratio) ? json() : json(r.warm_ratio);
        j["default"] = r.default_ratio;
        arr.push_back(j);
    }
    return arr.dump(2) + "\n";
}

std::vector<ReportRow> report_from_json(const std::string& text) {
    json arr;
    try {
        arr = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("report: not valid JSON: ") + e.what());
    }
    if (!arr.is_array()) throw ValidationError("report: expected a JSON array");
    std::vector<ReportRow> rows;
    for (const auto& j : arr) {
        ReportRow r;
        r.workload = j.at("workload").get<std::string>();
        if (j.contains("cold") && !j["cold"].is_null()) r.cold_ratio = j["cold"].get<double>();
        if (j.contains("inplace") && !j["inplace"].is_null())
            r.inplace_ratio = j["inplace"].get<double>();
        if (j.contains("warm") && !j["warm"].is_null()) r.warm_ratio = j["warm"].get<double>();
        if (j.contains("default")) r.default_ratio = j["default"].get<double>();
        rows.push_back(r);
    }
    return rows;
}

std::string plot_to_csv(std::span<const PlotPoint> points) {
    std::string out = "x,y,group\n";
    char buf[64];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof(buf), "%.6f", p.y);
        out += p.x + "," + buf + "," + p.group + "\n";
    }
    return out;
}

std::vector<MeasurementRow> measurements_from_csv(const std::string& text) {
    std::vector<MeasurementRow> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.rfind("plan_id,", 0) == 0) continue;
        std::istringstream row(line);
        std::string f[7];
        for (int i = 0; i < 6; ++i)
            if (!std::getline(row, f[i], ',')) throw FormatError("expected 7 fields", line_no);
        if (!std::getline(row, f[6])) throw FormatError("expected 7 fields", line_no);
        try {
            MeasurementRow m;
            m.plan_id = f[0];
            m.step_index = std::stoi(f[1]);
            m.from_mcpu = std::stoi(f[2]);
            m.to_mcpu = std::stoi(f[3]);
            m.repetition = std::stoi(f[4]);
            m.injected_ms = std::stod(f[5]);
            m.measured_ms = std::stod(f[6]);
            rows.push_back(m);
        } catch (const std::exception& e) {
            throw FormatError(std::string("bad measurement row: ") + e.what(), line_no);
        }
    }
    return rows;
}

std::vector<MeasurementRow> measurements_from_file(const std::string& path) {
    return measurements_from_csv(read_file(path));
}

std::vector<PlotPoint> interval_mean_series(const std::vector<MeasurementRow>& rows,
                                            const std::string& group) {
    std::map<int, std::pair<double, int>> by_target;  // to_mcpu -> (sum, n)
    for (const auto& r : rows) {
        auto& [sum, n] = by_target[r.to_mcpu];
        sum += r.measured_ms;
        ++n;
    }
    std::vector<PlotPoint> out;
    for (const auto& [target, agg] : by_target)
        out.push_back({std::to_string(target), agg.first / agg.second, group});
    return out;
}

std::vector<PlotPoint> policy_mean_series(const std::vector<RunSummary>& summaries) {
    std::vector<PlotPoint> out;
    for (const auto& s : summaries) out.push_back({to_string(s.policy), s.stats.mean_ms, s.workload});
    return out;
}

std::vector<PlotPoint> runtime_vs_inplace_series(const std::vector<ReportRow>& rows) {
    std::vector<PlotPoint> out;
    char buf[64];
    for (const auto& r : rows) {
        if (std::isnan(r.inplace_ratio)) continue;
        std::snprintf(buf, sizeof(buf), "%.2f", find_workload(r.workload).runtime_at_1000m_ms);
        out.push_back({buf, r.inplace_ratio, r.workload});
    }
    return out;
}

}  // namespace warmslice
