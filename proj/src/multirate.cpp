#include "mcsched/multirate.hpp"

namespace mcsched {

const Rat& MultiRateAssignment::rate(const std::string& id, size_t j) const {
    const auto& trans = theta_trans.at(id);
    if (j >= 1 && j <= trans.size()) return trans[j - 1];
    if (j == trans.size() + 1) return theta_hi.at(id);
    throw std::out_of_range("window index out of range");
}

Rat MultiRateAssignment::window_prefix(size_t count) const {
    Rat s(0);
    for (size_t j = 0; j < count && j < windows.size(); ++j) s += windows[j];
    return s;
}

void check_covers(const TaskSet& ts, const MultiRateAssignment& a) {
    const size_t n_hi = ts.hi_count();
    if (a.windows.size() != n_hi)
        throw AssignmentError("expected " + std::to_string(n_hi) + " windows, got " +
                              std::to_string(a.windows.size()));
    for (const auto& w : a.windows)
        if (w.is_negative()) throw AssignmentError("negative window length");

    const Rat one(1);
    for (const auto& t : ts.tasks()) {
        auto lo = a.theta_lo.find(t.id);
        if (lo == a.theta_lo.end()) throw AssignmentError("missing thetaL for task " + t.id);
        if (!lo->second.is_positive() || lo->second > one)
            throw AssignmentError("thetaL outside (0,1] for task " + t.id);
        if (!t.is_hi()) {
            if (a.theta_trans.count(t.id) || a.theta_hi.count(t.id))
                throw AssignmentError("HI-mode rates given for LO task " + t.id);
            continue;
        }
        auto tr = a.theta_trans.find(t.id);
        if (tr == a.theta_trans.end()) throw AssignmentError("missing thetaTrans for task " + t.id);
        if (tr->second.size() != n_hi) throw AssignmentError("thetaTrans length mismatch for task " + t.id);
        for (const auto& r : tr->second)
            if (r.is_negative() || r > one) throw AssignmentError("transition rate outside [0,1] for task " + t.id);
        auto hi = a.theta_hi.find(t.id);
        if (hi == a.theta_hi.end()) throw AssignmentError("missing thetaH for task " + t.id);
        if (!hi->second.is_positive() || hi->second > one)
            throw AssignmentError("thetaH outside (0,1] for task " + t.id);
    }
    if (a.theta_lo.size() != ts.size()) throw AssignmentError("thetaL names tasks not in the set");
    if (a.theta_trans.size() != n_hi || a.theta_hi.size() != n_hi)
        throw AssignmentError("HI-mode rates name tasks not in the set");
}

Rat hi_mode_remaining(const MCTask& task, const Rat& theta_lo) { return task.period - task.wcet_lo / theta_lo; }

size_t earliest_completion_window(const MCTask& task, const Rat& theta_lo, std::span<const Rat> windows) {
    const Rat remaining = hi_mode_remaining(task, theta_lo);
    if (!remaining.is_positive())
        throw NonpositiveRemainingTime("task " + task.id + ": T - C^L/theta^L = " + remaining.to_string() +
                                       " is not positive");
    Rat prefix(0);  // sum_{j<k} w_j
    for (size_t k = 1; k <= windows.size(); ++k) {
        // prefix < remaining holds on entry
        if (prefix + windows[k - 1] >= remaining) return k;
        prefix += windows[k - 1];
    }
    return windows.size() + 1;
}

bool carry_over_test(const MCTask& task, const MultiRateAssignment& a, size_t k) {
    const size_t n = a.windows.size();
    const Rat& theta_lo = a.theta_lo.at(task.id);

    Rat budget(0), before(0);
    for (size_t j = 1; j < k; ++j) {
        budget += a.rate(task.id, j) * a.windows[j - 1];
        before += a.windows[j - 1];
    }
    const Rat& r = a.rate(task.id, k);  // R_i: window k's rate, or the stable rate
    budget += r * (hi_mode_remaining(task, theta_lo) - before);
    if (budget < task.wcet_hi - task.wcet_lo) return false;

    for (size_t j = k; j <= n; ++j)
        if (theta_lo > a.rate(task.id, j)) return false;
    return theta_lo <= a.theta_hi.at(task.id);
}

bool transition_and_stable_test(const MCTask& task, const MultiRateAssignment& a, size_t k) {
    const size_t n = a.windows.size();
    const Rat u_hi = task_utilizations(task).hi;

    Rat service(0), before(0);
    for (size_t j = 1; j < k; ++j) {
        service += a.rate(task.id, j) * a.windows[j - 1];
        before += a.windows[j - 1];
    }
    if (service < u_hi * before) return false;

    // non-decreasing across the windows that precede k
    for (size_t j = 1; j + 1 < k; ++j)
        if (a.rate(task.id, j) > a.rate(task.id, j + 1)) return false;

    for (size_t j = k; j <= n; ++j)
        if (a.rate(task.id, j) < u_hi) return false;
    return a.theta_hi.at(task.id) >= u_hi;
}

std::string to_string(MultiCondition c) {
    switch (c) {
        case MultiCondition::LoTaskRate: return "lo-task-rate";
        case MultiCondition::LoPlatform: return "lo-platform";
        case MultiCondition::HiPlatform: return "hi-platform";
        case MultiCondition::CarryOver: return "carry-over";
        case MultiCondition::Transition: return "transition";
    }
    return "?";
}

std::string describe(const MultiVerdict& v) {
    if (v.schedulable) return "schedulable";
    std::string s = "failed(" + to_string(v.failed) + ")";
    if (!v.task_id.empty()) s += " task " + v.task_id;
    return s;
}

namespace {

size_t completion_window_or_first(const MCTask& t, const MultiRateAssignment& a) {
    const Rat& theta_lo = a.theta_lo.at(t.id);
    if (hi_mode_remaining(t, theta_lo).is_zero()) return 1;
    return earliest_completion_window(t, theta_lo, a.windows);
}

}  // namespace

std::map<std::string, size_t> completion_windows(const TaskSet& ts, const MultiRateAssignment& a) {
    std::map<std::string, size_t> k;
    for (const auto& t : ts.tasks())
        if (t.is_hi()) k[t.id] = completion_window_or_first(t, a);
    return k;
}

MultiVerdict multi_rate_test(const TaskSet& ts, const MultiRateAssignment& a, const MultiRateTestOptions& opt) {
    check_covers(ts, a);
    const Rat m(ts.processors());
    const size_t n = a.windows.size();

    for (const auto& t : ts.tasks())
        if (a.theta_lo.at(t.id) < task_utilizations(t).lo) return {false, MultiCondition::LoTaskRate, t.id};

    if (opt.lo_platform) {
        Rat s(0);
        for (const auto& [id, r] : a.theta_lo) s += r;
        if (s > m) return {false, MultiCondition::LoPlatform, ""};
    }

    for (size_t j = 1; j <= n + 1; ++j) {
        Rat s(0);
        for (const auto& t : ts.tasks())
            if (t.is_hi()) s += a.rate(t.id, j);
        if (s > m) return {false, MultiCondition::HiPlatform, ""};
    }

    // theta^L >= u^L holds here, so the remaining time is never negative.
    std::vector<std::pair<const MCTask*, size_t>> hi;
    for (const auto& t : ts.tasks())
        if (t.is_hi()) hi.emplace_back(&t, completion_window_or_first(t, a));

    for (const auto& [t, k] : hi)
        if (!carry_over_test(*t, a, k)) return {false, MultiCondition::CarryOver, t->id};
    for (const auto& [t, k] : hi)
        if (!transition_and_stable_test(*t, a, k)) return {false, MultiCondition::Transition, t->id};
    return {};
}

MultiRateAssignment embed_dual_rate(const TaskSet& ts, const DualRateAssignment& d) {
    check_covers(ts, d);
    MultiRateAssignment a;
    a.theta_lo = d.theta_lo;
    a.theta_hi = d.theta_hi;
    const size_t n = ts.hi_count();
    a.windows.assign(n, Rat(0));
    for (const auto& [id, r] : d.theta_hi) a.theta_trans[id] = std::vector<Rat>(n, r);
    return a;
}

}  // namespace mcsched
