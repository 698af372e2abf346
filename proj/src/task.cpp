#include "mcsched/task.hpp"

#include <set>

namespace mcsched {

std::string to_string(Criticality c) { return c == Criticality::HI ? "HI" : "LO"; }

Criticality parse_criticality(const std::string& s) {
    if (s == "HI") return Criticality::HI;
    if (s == "LO") return Criticality::LO;
    throw std::invalid_argument("criticality must be \"LO\" or \"HI\", got \"" + s + "\"");
}

Utilization task_utilizations(const MCTask& task) {
    return {task.wcet_lo / task.period, task.wcet_hi / task.period};
}

namespace {

std::string join(const std::vector<Violation>& v) {
    std::string out = "invalid task set:";
    for (const auto& x : v) {
        out += " [";
        if (!x.task_id.empty()) out += x.task_id + ": ";
        out += x.message + "]";
    }
    return out;
}

}  // namespace

InvalidTaskSet::InvalidTaskSet(std::vector<Violation> v)
    : std::invalid_argument(join(v)), violations_(std::move(v)) {}

std::vector<Violation> validate(const std::vector<MCTask>& tasks, int m) {
    std::vector<Violation> out;
    if (m < 1) out.push_back({"", "processor count must be positive"});

    std::set<std::string> seen;
    for (const auto& t : tasks) {
        if (t.id.empty()) out.push_back({"", "empty task id"});
        if (!seen.insert(t.id).second) out.push_back({t.id, "duplicate id"});
        if (!t.period.is_positive()) {
            out.push_back({t.id, "nonpositive period"});
            continue;  // utilizations undefined
        }
        if (!t.wcet_lo.is_positive()) out.push_back({t.id, "nonpositive C_L"});
        if (t.wcet_lo > t.wcet_hi) out.push_back({t.id, "C_L > C_H"});
        if (t.chi == Criticality::LO && t.wcet_lo != t.wcet_hi)
            out.push_back({t.id, "LO task with C_L != C_H"});
        const auto u = task_utilizations(t);
        if (u.lo > Rat(1)) out.push_back({t.id, "u_L > 1"});
        if (u.hi > Rat(1)) out.push_back({t.id, "u_H > 1"});
    }
    return out;
}

TaskSet::TaskSet(std::vector<MCTask> tasks, int m) : tasks_(std::move(tasks)), m_(m) {
    if (auto v = validate(tasks_, m_); !v.empty()) throw InvalidTaskSet(std::move(v));
}

size_t TaskSet::hi_count() const {
    size_t n = 0;
    for (const auto& t : tasks_) n += t.is_hi() ? 1 : 0;
    return n;
}

std::vector<size_t> TaskSet::hi_indices() const {
    std::vector<size_t> idx;
    for (size_t i = 0; i < tasks_.size(); ++i)
        if (tasks_[i].is_hi()) idx.push_back(i);
    return idx;
}

std::vector<size_t> TaskSet::lo_indices() const {
    std::vector<size_t> idx;
    for (size_t i = 0; i < tasks_.size(); ++i)
        if (!tasks_[i].is_hi()) idx.push_back(i);
    return idx;
}

std::optional<size_t> TaskSet::find(const std::string& id) const {
    for (size_t i = 0; i < tasks_.size(); ++i)
        if (tasks_[i].id == id) return i;
    return std::nullopt;
}

const MCTask& TaskSet::at(const std::string& id) const {
    auto i = find(id);
    if (!i) throw std::out_of_range("unknown task id: " + id);
    return tasks_[*i];
}

SystemUtilization system_utilizations(const TaskSet& ts) {
    SystemUtilization s{Rat(0), Rat(0), Rat(0)};
    for (const auto& t : ts.tasks()) {
        const auto u = task_utilizations(t);
        if (t.is_hi()) {
            s.lo_of_hi += u.lo;
            s.hi_of_hi += u.hi;
        } else {
            s.lo_of_lo += u.lo;
        }
    }
    const Rat m(ts.processors());
    s.lo_of_lo /= m;
    s.lo_of_hi /= m;
    s.hi_of_hi /= m;
    return s;
}

}  // namespace mcsched
