#include "mcsched/io.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>

namespace mcsched {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("invalid JSON: ") + e.what());
    }
}

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw InputError(where + ": expected an object");
}

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok |= key == a;
        if (!ok) throw InputError(where + ": unknown key \"" + key + "\"");
    }
}

const json& field(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw InputError(where + ": missing \"" + key + "\"");
    return *it;
}

Rat rational(const json& j, const std::string& where) {
    if (!j.is_string()) throw InputError(where + ": expected a decimal string");
    try {
        return Rat::parse(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw InputError(where + ": " + e.what());
    }
}

std::string text(const json& j, const std::string& where) {
    if (!j.is_string()) throw InputError(where + ": expected a string");
    return j.get<std::string>();
}

long long count(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw InputError(where + ": expected an integer");
    return j.get<long long>();
}

std::map<std::string, Rat> rate_map(const json& j, const std::string& where) {
    require_object(j, where);
    std::map<std::string, Rat> out;
    for (const auto& [id, v] : j.items()) out[id] = rational(v, where + "." + id);
    return out;
}

ordered_json rate_json(const std::map<std::string, Rat>& m) {
    ordered_json o = ordered_json::object();
    for (const auto& [id, r] : m) o[id] = r.to_string();
    return o;
}

}  // namespace

TaskSet parse_task_set(const std::string& s) {
    const json j = parse_json(s);
    require_object(j, "task set");
    only_keys(j, {"m", "tasks"}, "task set");
    const long long m = count(field(j, "m", "task set"), "task set.m");
    const json& arr = field(j, "tasks", "task set");
    if (!arr.is_array()) throw InputError("task set.tasks: expected an array");

    std::vector<MCTask> tasks;
    for (size_t i = 0; i < arr.size(); ++i) {
        const std::string where = "tasks[" + std::to_string(i) + "]";
        const json& t = arr[i];
        require_object(t, where);
        only_keys(t, {"id", "T", "chi", "CL", "CH"}, where);
        MCTask task;
        task.id = text(field(t, "id", where), where + ".id");
        task.period = rational(field(t, "T", where), where + ".T");
        try {
            task.chi = parse_criticality(text(field(t, "chi", where), where + ".chi"));
        } catch (const std::invalid_argument& e) {
            throw InputError(where + ".chi: " + e.what());
        }
        task.wcet_lo = rational(field(t, "CL", where), where + ".CL");
        if (t.contains("CH")) task.wcet_hi = rational(t["CH"], where + ".CH");
        else if (task.is_hi()) throw InputError(where + ": missing \"CH\"");
        else task.wcet_hi = task.wcet_lo;
        tasks.push_back(std::move(task));
    }
    if (m < 1 || m > 1'000'000) throw InputError("task set.m: processor count out of range");
    try {
        return TaskSet(std::move(tasks), static_cast<int>(m));
    } catch (const InvalidTaskSet& e) {
        throw InputError(e.what());
    }
}

std::string format_task_set(const TaskSet& ts) {
    ordered_json j;
    j["m"] = ts.processors();
    j["tasks"] = ordered_json::array();
    for (const auto& t : ts.tasks()) {
        ordered_json o;
        o["id"] = t.id;
        o["T"] = t.period.to_string();
        o["chi"] = to_string(t.chi);
        o["CL"] = t.wcet_lo.to_string();
        o["CH"] = t.wcet_hi.to_string();
        j["tasks"].push_back(std::move(o));
    }
    return j.dump(2) + "\n";
}

DualRateAssignment parse_dual_rate(const std::string& s) {
    const json j = parse_json(s);
    require_object(j, "dual-rate assignment");
    only_keys(j, {"thetaL", "thetaH"}, "dual-rate assignment");
    DualRateAssignment a;
    a.theta_lo = rate_map(field(j, "thetaL", "dual-rate assignment"), "thetaL");
    a.theta_hi = rate_map(field(j, "thetaH", "dual-rate assignment"), "thetaH");
    return a;
}

std::string format_dual_rate(const DualRateAssignment& a) {
    ordered_json j;
    j["thetaL"] = rate_json(a.theta_lo);
    j["thetaH"] = rate_json(a.theta_hi);
    return j.dump(2) + "\n";
}

MultiRateAssignment parse_multi_rate(const std::string& s) {
    const json j = parse_json(s);
    const std::string where = "multi-rate assignment";
    require_object(j, where);
    only_keys(j, {"thetaL", "windows", "thetaTrans", "thetaH"}, where);
    MultiRateAssignment a;
    a.theta_lo = rate_map(field(j, "thetaL", where), "thetaL");
    a.theta_hi = rate_map(field(j, "thetaH", where), "thetaH");
    const json& w = field(j, "windows", where);
    if (!w.is_array()) throw InputError("windows: expected an array");
    for (size_t i = 0; i < w.size(); ++i) a.windows.push_back(rational(w[i], "windows[" + std::to_string(i) + "]"));
    const json& tr = field(j, "thetaTrans", where);
    require_object(tr, "thetaTrans");
    for (const auto& [id, v] : tr.items()) {
        if (!v.is_array()) throw InputError("thetaTrans." + id + ": expected an array");
        auto& rates = a.theta_trans[id];
        for (size_t i = 0; i < v.size(); ++i)
            rates.push_back(rational(v[i], "thetaTrans." + id + "[" + std::to_string(i) + "]"));
    }
    return a;
}

std::string format_multi_rate(const MultiRateAssignment& a) {
    ordered_json j;
    j["thetaL"] = rate_json(a.theta_lo);
    j["windows"] = ordered_json::array();
    for (const auto& w : a.windows) j["windows"].push_back(w.to_string());
    j["thetaTrans"] = ordered_json::object();
    for (const auto& [id, rates] : a.theta_trans) {
        auto& arr = j["thetaTrans"][id] = ordered_json::array();
        for (const auto& r : rates) arr.push_back(r.to_string());
    }
    j["thetaH"] = rate_json(a.theta_hi);
    return j.dump(2) + "\n";
}

MultiRateAssignment parse_assignment(const TaskSet& ts, const std::string& s) {
    const json j = parse_json(s);
    if (j.is_object() && !j.contains("windows")) {
        const auto d = parse_dual_rate(s);
        try {
            return embed_dual_rate(ts, d);
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
    }
    return parse_multi_rate(s);
}

ScenarioSpec parse_scenario(const std::string& s) {
    const json j = parse_json(s);
    require_object(j, "scenario");
    only_keys(j, {"horizon", "releases", "demands", "switch"}, "scenario");
    ScenarioSpec sc;
    if (j.contains("horizon")) sc.horizon = rational(j["horizon"], "horizon");

    const json& rel = field(j, "releases", "scenario");
    require_object(rel, "releases");
    for (const auto& [id, v] : rel.items()) {
        if (!v.is_array()) throw InputError("releases." + id + ": expected an array");
        auto& out = sc.releases[id];
        for (size_t i = 0; i < v.size(); ++i)
            out.push_back(rational(v[i], "releases." + id + "[" + std::to_string(i) + "]"));
    }

    if (j.contains("demands")) {
        const json& dem = j["demands"];
        require_object(dem, "demands");
        for (const auto& [id, per_job] : dem.items()) {
            require_object(per_job, "demands." + id);
            for (const auto& [k, v] : per_job.items()) {
                size_t idx = 0;
                try {
                    size_t used = 0;
                    idx = std::stoul(k, &used);
                    if (used != k.size()) throw std::invalid_argument(k);
                } catch (const std::exception&) {
                    throw InputError("demands." + id + ": job key \"" + k + "\" is not an index");
                }
                sc.demands[id][idx] = rational(v, "demands." + id + "." + k);
            }
        }
    }

    if (j.contains("switch")) {
        const json& sw = j["switch"];
        require_object(sw, "switch");
        only_keys(sw, {"kind", "task", "job", "at"}, "switch");
        const std::string kind = text(field(sw, "kind", "switch"), "switch.kind");
        if (kind == "none") {
            sc.switch_kind = SwitchKind::None;
        } else if (kind == "job") {
            sc.switch_kind = SwitchKind::JobTriggered;
            sc.trigger_task = text(field(sw, "task", "switch"), "switch.task");
            const long long k = sw.contains("job") ? count(sw["job"], "switch.job") : 0;
            if (k < 0) throw InputError("switch.job: negative index");
            sc.trigger_job = static_cast<size_t>(k);
        } else if (kind == "explicit") {
            sc.switch_kind = SwitchKind::Explicit;
            sc.switch_at = rational(field(sw, "at", "switch"), "switch.at");
        } else {
            throw InputError("switch.kind: expected none, job or explicit");
        }
    }
    return sc;
}

std::string format_scenario(const ScenarioSpec& sc) {
    ordered_json j;
    if (sc.horizon) j["horizon"] = sc.horizon->to_string();
    j["releases"] = ordered_json::object();
    for (const auto& [id, rel] : sc.releases) {
        auto& arr = j["releases"][id] = ordered_json::array();
        for (const auto& r : rel) arr.push_back(r.to_string());
    }
    if (!sc.demands.empty()) {
        j["demands"] = ordered_json::object();
        for (const auto& [id, per_job] : sc.demands)
            for (const auto& [k, d] : per_job) j["demands"][id][std::to_string(k)] = d.to_string();
    }
    ordered_json sw;
    switch (sc.switch_kind) {
        case SwitchKind::None: sw["kind"] = "none"; break;
        case SwitchKind::JobTriggered:
            sw["kind"] = "job";
            sw["task"] = sc.trigger_task;
            sw["job"] = sc.trigger_job;
            break;
        case SwitchKind::Explicit:
            sw["kind"] = "explicit";
            sw["at"] = sc.switch_at.to_string();
            break;
    }
    j["switch"] = sw;
    return j.dump(2) + "\n";
}

void write_trace(std::ostream& os, const ScheduleTrace& trace) {
    os << "# switch " << (trace.switch_at ? trace.switch_at->to_string() : "none") << "\n";
    os << "core,task,start,end\n";
    for (const auto& s : trace.slices)
        os << s.core << "," << s.task << "," << s.start.to_string() << "," << s.end.to_string() << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace mcsched
