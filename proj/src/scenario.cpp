#include "warmslice/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace warmslice {

using nlohmann::json;

void ScenarioConfig::validate() const {
    policy.validate();
    driver.validate();
    if (workload.name.empty()) throw ValidationError("workload: must be set");
    if (workload.runtime_at_1000m_ms <= 0.0)
        throw ValidationError("workload.runtime_at_1000m_ms: must be > 0");
    if (driver.workload != workload.name)
        throw ValidationError("driver.workload: does not match scenario workload");
    if (replications < 1) throw ValidationError("replications: must be >= 1");
    if (policy.active_cpu.value > node.capacity.value)
        throw ValidationError("policy.active_cpu: exceeds node capacity");
    const bool pooled = policy.kind == PolicyKind::Warm || policy.kind == PolicyKind::Default;
    if (pooled && policy.min_scale * policy.active_cpu.value > node.capacity.value)
        throw ValidationError("policy.min_scale: ready pool exceeds node capacity");
    if (policy.kind == PolicyKind::InPlace &&
        policy.parked_pool * policy.park_cpu.value > node.capacity.value)
        throw ValidationError("policy.parked_pool: parked pool exceeds node capacity");
}

ScenarioConfig make_scenario(PolicyKind kind, const std::string& workload_name, ArrivalPlan driver,
                             std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.workload = find_workload(workload_name);
    cfg.policy = calibrated_config(kind, cfg.workload);
    driver.workload = workload_name;
    cfg.driver = driver;
    cfg.seed = seed;
    cfg.validate();
    return cfg;
}

namespace {

void reject_unknown_keys(const json& obj, const std::string& path,
                         const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) throw ValidationError(path + "." + key + ": unknown key");
}

double require_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ValidationError(path + ": expected a number");
    return v.get<double>();
}

int require_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ValidationError(path + ": expected an integer");
    return v.get<int>();
}

std::string require_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw ValidationError(path + ": expected a string");
    return v.get<std::string>();
}

MilliCpu require_mcpu(const json& v, const std::string& path) {
    const int raw = require_int(v, path);
    try {
        return MilliCpu(raw);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("scenario: not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("scenario: expected a JSON object");
    reject_unknown_keys(doc, "scenario",
                        {"node", "policy", "workload", "driver", "calibration", "seed",
                         "replications"});

    ScenarioConfig cfg;

    if (doc.contains("node")) {
        const json& node = doc["node"];
        reject_unknown_keys(node, "scenario.node", {"capacity_mcpu"});
        if (node.contains("capacity_mcpu")) {
            try {
                cfg.node = NodeSpec(require_mcpu(node["capacity_mcpu"], "scenario.node.capacity_mcpu"));
            } catch (const std::invalid_argument& e) {
                throw ValidationError(std::string("scenario.node.capacity_mcpu: ") + e.what());
            }
        }
    }

    // Workload first: calibrated policy overheads depend on it.
    if (!doc.contains("workload")) throw ValidationError("scenario.workload: required");
    if (doc["workload"].is_string()) {
        try {
            cfg.workload = find_workload(doc["workload"].get<std::string>());
        } catch (const NotFoundError& e) {
            throw ValidationError(std::string("scenario.workload: ") + e.what());
        }
    } else if (doc["workload"].is_object()) {
        const json& w = doc["workload"];
        reject_unknown_keys(w, "scenario.workload",
                            {"name", "runtime_at_1000m_ms", "cpu_bound_fraction"});
        if (!w.contains("name") || !w.contains("runtime_at_1000m_ms"))
            throw ValidationError("scenario.workload: inline spec needs name and runtime_at_1000m_ms");
        const double rt = require_number(w["runtime_at_1000m_ms"], "scenario.workload.runtime_at_1000m_ms");
        if (rt <= 0.0) throw ValidationError("scenario.workload.runtime_at_1000m_ms: must be > 0");
        cfg.workload = make_workload(require_string(w["name"], "scenario.workload.name"), rt);
        if (w.contains("cpu_bound_fraction")) {
            cfg.workload.cpu_bound_fraction =
                require_number(w["cpu_bound_fraction"], "scenario.workload.cpu_bound_fraction");
            if (cfg.workload.cpu_bound_fraction < 0.0 || cfg.workload.cpu_bound_fraction > 1.0)
                throw ValidationError("scenario.workload.cpu_bound_fraction: must be in [0, 1]");
        }
    } else {
        throw ValidationError("scenario.workload: expected a name or an inline object");
    }

    if (!doc.contains("policy")) throw ValidationError("scenario.policy: required");
    {
        const json& p = doc["policy"];
        if (!p.is_object()) throw ValidationError("scenario.policy: expected an object");
        reject_unknown_keys(p, "scenario.policy",
                            {"kind", "stable_window_ms", "min_scale", "park_cpu_mcpu",
                             "active_cpu_mcpu", "cold_start_ms", "platform_overhead_ms",
                             "parked_pool", "resize_load"});
        if (!p.contains("kind")) throw ValidationError("scenario.policy.kind: required");
        PolicyKind kind;
        try {
            kind = policy_from_string(require_string(p["kind"], "scenario.policy.kind"));
        } catch (const std::invalid_argument& e) {
            throw ValidationError(std::string("scenario.policy.kind: ") + e.what());
        }

        // Calibrated overheads are the default for catalog workloads;
        // inline workloads must spell them out.
        bool calibrated = true;
        try {
            cfg.policy = calibrated_config(kind, cfg.workload);
        } catch (const NotFoundError&) {
            calibrated = false;
            cfg.policy = PolicyConfig{};
            cfg.policy.kind = kind;
        }
        if (p.contains("stable_window_ms"))
            cfg.policy.stable_window_ms = require_number(p["stable_window_ms"], "scenario.policy.stable_window_ms");
        if (p.contains("min_scale"))
            cfg.policy.min_scale = require_int(p["min_scale"], "scenario.policy.min_scale");
        if (p.contains("park_cpu_mcpu"))
            cfg.policy.park_cpu = require_mcpu(p["park_cpu_mcpu"], "scenario.policy.park_cpu_mcpu");
        if (p.contains("active_cpu_mcpu"))
            cfg.policy.active_cpu = require_mcpu(p["active_cpu_mcpu"], "scenario.policy.active_cpu_mcpu");
        if (p.contains("cold_start_ms"))
            cfg.policy.cold_start_ms = require_number(p["cold_start_ms"], "scenario.policy.cold_start_ms");
        if (p.contains("platform_overhead_ms"))
            cfg.policy.platform_overhead_ms =
                require_number(p["platform_overhead_ms"], "scenario.policy.platform_overhead_ms");
        if (p.contains("parked_pool"))
            cfg.policy.parked_pool = require_int(p["parked_pool"], "scenario.policy.parked_pool");
        if (p.contains("resize_load")) {
            try {
                cfg.policy.resize_load =
                    load_from_string(require_string(p["resize_load"], "scenario.policy.resize_load"));
            } catch (const std::invalid_argument& e) {
                throw ValidationError(std::string("scenario.policy.resize_load: ") + e.what());
            }
        }
        if (!calibrated && kind != PolicyKind::Default && !p.contains("cold_start_ms") &&
            !p.contains("platform_overhead_ms"))
            throw ValidationError(
                "scenario.policy: inline workloads need explicit cold_start_ms/platform_overhead_ms");
    }

    cfg.driver.workload = cfg.workload.name;
    if (doc.contains("driver")) {
        const json& d = doc["driver"];
        if (!d.is_object()) throw ValidationError("scenario.driver: expected an object");
        reject_unknown_keys(d, "scenario.driver",
                            {"mode", "vus", "iterations", "think_ms", "rate_rps", "horizon_ms"});
        const std::string mode =
            d.contains("mode") ? require_string(d["mode"], "scenario.driver.mode") : "closed-loop";
        if (mode == "closed-loop") {
            cfg.driver.mode = ArrivalPlan::Mode::ClosedLoop;
            if (d.contains("vus")) cfg.driver.vus = require_int(d["vus"], "scenario.driver.vus");
            if (d.contains("iterations"))
                cfg.driver.iterations = require_int(d["iterations"], "scenario.driver.iterations");
            if (d.contains("think_ms"))
                cfg.driver.think_ms = require_number(d["think_ms"], "scenario.driver.think_ms");
            if (d.contains("rate_rps") || d.contains("horizon_ms"))
                throw ValidationError("scenario.driver: rate_rps/horizon_ms are poisson-only");
        } else if (mode == "poisson") {
            cfg.driver.mode = ArrivalPlan::Mode::Poisson;
            if (!d.contains("rate_rps") || !d.contains("horizon_ms"))
                throw ValidationError("scenario.driver: poisson needs rate_rps and horizon_ms");
            cfg.driver.rate_rps = require_number(d["rate_rps"], "scenario.driver.rate_rps");
            cfg.driver.horizon_ms = require_number(d["horizon_ms"], "scenario.driver.horizon_ms");
            if (d.contains("vus") || d.contains("iterations") || d.contains("think_ms"))
                throw ValidationError("scenario.driver: vus/iterations/think_ms are closed-loop-only");
        } else {
            throw ValidationError("scenario.driver.mode: expected closed-loop or poisson");
        }
    }

    if (doc.contains("calibration")) {
        cfg.calibration_source = require_string(doc["calibration"], "scenario.calibration");
        if (cfg.calibration_source != "default")
            cfg.calibration = ResizeLatencyTable::from_file(cfg.calibration_source);
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer() || doc["seed"].get<std::int64_t>() < 0)
            throw ValidationError("scenario.seed: expected a non-negative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("replications"))
        cfg.replications = require_int(doc["replications"], "scenario.replications");

    cfg.validate();
    return cfg;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace warmslice
