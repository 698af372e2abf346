#include "mcsched/simulator.hpp"

#include "mcsched/rng.hpp"

#include <algorithm>

namespace mcsched {

std::string job_name(const std::string& task, size_t index) { return task + "#" + std::to_string(index); }

std::map<std::string, std::vector<Rat>> synchronous_releases(const TaskSet& ts, const Rat& until) {
    std::map<std::string, std::vector<Rat>> out;
    for (const auto& t : ts.tasks()) {
        auto& r = out[t.id];
        for (Rat x(0); x < until; x += t.period) r.push_back(x);
    }
    return out;
}

namespace {

struct Job {
    size_t index;
    Rat release, deadline, demand;
};

// Everything the partitioning and the simulation need, resolved once.
struct Timeline {
    const TaskSet* ts;
    const MultiRateAssignment* a;
    std::optional<Rat> switch_at;
    Rat horizon;
    std::vector<Rat> prefix;             // S_0 = 0, S_j = w_1 + ... + w_j
    std::vector<std::vector<Job>> jobs;  // per task, in release order
    std::vector<Rat> boundaries;
};

Rat window_total(const MultiRateAssignment& a) { return a.window_prefix(a.windows.size()); }

Rat max_period(const TaskSet& ts) {
    Rat m(0);
    for (const auto& t : ts.tasks()) m = max(m, t.period);
    return m;
}

Rat lo_deadline_reach(const MCTask& t, const MultiRateAssignment& a, const Rat& release) {
    return release + t.wcet_lo / a.theta_lo.at(t.id);
}

Rat overlap(const Rat& a1, const Rat& a2, const Rat& b1, const Rat& b2) {
    const Rat lo = max(a1, b1), hi = min(a2, b2);
    return hi > lo ? hi - lo : Rat(0);
}

Rat allocation_after_switch(const MultiRateAssignment& a, const std::string& id, const std::vector<Rat>& S,
                            const Rat& x1, const Rat& x2) {
    const size_t n = S.size() - 1;
    Rat total(0);
    for (size_t j = 1; j <= n; ++j) {
        if (S[j] <= x1 || S[j - 1] >= x2) continue;
        total += a.rate(id, j) * overlap(x1, x2, S[j - 1], S[j]);
    }
    if (x2 > S[n]) total += a.theta_hi.at(id) * (x2 - max(x1, S[n]));
    return total;
}

std::vector<Rat> prefixes(const MultiRateAssignment& a) {
    std::vector<Rat> S(a.windows.size() + 1, Rat(0));
    for (size_t j = 0; j < a.windows.size(); ++j) S[j + 1] = S[j] + a.windows[j];
    return S;
}

Rat default_demand(const MCTask& t, const MultiRateAssignment& a, const std::optional<Rat>& sw, const Rat& release) {
    if (!t.is_hi() || !sw) return t.wcet_lo;
    return lo_deadline_reach(t, a, release) >= *sw ? t.wcet_hi : t.wcet_lo;
}

Timeline make_timeline(const TaskSet& ts, const MultiRateAssignment& a, const ScenarioSpec& sc,
                       const PartitionOptions& opt) {
    Timeline tl;
    tl.ts = &ts;
    tl.a = &a;
    tl.switch_at = switch_instant(ts, a, sc);
    tl.horizon = default_horizon(ts, a, sc);
    tl.prefix = prefixes(a);
    const auto& sw = tl.switch_at;

    std::vector<Rat> b{Rat(0), tl.horizon};
    auto add = [&](const Rat& t) {
        if (!t.is_negative() && t <= tl.horizon) b.push_back(t);
    };

    tl.jobs.resize(ts.size());
    for (size_t ti = 0; ti < ts.size(); ++ti) {
        const auto& t = ts.tasks()[ti];
        auto rel = sc.releases.find(t.id);
        if (rel == sc.releases.end()) continue;
        const auto dem = sc.demands.find(t.id);
        for (size_t k = 0; k < rel->second.size(); ++k) {
            const Rat& r = rel->second[k];
            if (r >= tl.horizon) break;
            if (!t.is_hi() && sw && r >= *sw) break;  // LO tasks stop releasing in HI-mode
            Job j{k, r, r + t.period, default_demand(t, a, sw, r)};
            if (dem != sc.demands.end()) {
                auto d = dem->second.find(k);
                if (d != dem->second.end()) j.demand = d->second;
            }
            add(r);
            if (t.is_hi() || !sw || j.deadline <= *sw) add(j.deadline);
            if (t.is_hi()) {
                const Rat reach = lo_deadline_reach(t, a, r);
                if (!sw || reach < *sw) add(reach);
            }
            tl.jobs[ti].push_back(std::move(j));
        }
    }
    if (sw) {
        add(*sw);
        const size_t n = a.windows.size();
        for (size_t j = 1; j <= n; ++j)
            if (opt.window_boundaries || j == n) add(*sw + tl.prefix[j]);
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    tl.boundaries = std::move(b);
    return tl;
}

// Walks the partitions, tracking each task's current job.
class Walker {
public:
    explicit Walker(const Timeline& tl) : tl_(tl), cur_(tl.ts->size(), 0) {}

    // Index into jobs[ti] of the job active at t, advancing past jobs whose
    // deadline is <= t. Calls on_deadline for each job passed over.
    template <class F>
    std::optional<size_t> active(size_t ti, const Rat& t, F&& on_deadline) {
        const auto& js = tl_.jobs[ti];
        while (cur_[ti] < js.size() && js[cur_[ti]].deadline <= t) on_deadline(cur_[ti]++);
        if (cur_[ti] < js.size() && js[cur_[ti]].release <= t) return cur_[ti];
        return std::nullopt;
    }

private:
    const Timeline& tl_;
    std::vector<size_t> cur_;
};

Partition plan_partition(const Timeline& tl, const Rat& t1, const Rat& t2, const std::vector<bool>& active) {
    const auto& ts = *tl.ts;
    const auto& a = *tl.a;
    Partition p;
    p.start = t1;
    p.end = t2;
    const auto& sw = tl.switch_at;
    const size_t n = a.windows.size();
    if (!sw || t2 <= *sw) {
        p.mode = PartitionMode::LO;
    } else if (t1 - *sw >= tl.prefix[n]) {
        p.mode = PartitionMode::HI;
    } else {
        p.mode = PartitionMode::Transition;
        const Rat x1 = t1 - *sw, x2 = t2 - *sw;
        p.first_window = n;
        for (size_t j = 1; j <= n; ++j)
            if (x1 < tl.prefix[j]) {
                p.first_window = j;
                break;
            }
        p.last_window = n;
        for (size_t j = 1; j <= n; ++j)
            if (x2 <= tl.prefix[j]) {
                p.last_window = j;
                break;
            }
    }
    const Rat len = t2 - t1;
    for (size_t ti = 0; ti < ts.size(); ++ti) {
        if (!active[ti]) continue;
        const auto& t = ts.tasks()[ti];
        if (p.mode == PartitionMode::LO) {
            p.allocations.push_back({t.id, a.theta_lo.at(t.id) * len});
        } else if (t.is_hi()) {
            p.allocations.push_back({t.id, allocation_after_switch(a, t.id, tl.prefix, t1 - *sw, t2 - *sw)});
        }
    }
    return p;
}

}  // namespace

std::optional<Rat> switch_instant(const TaskSet& ts, const MultiRateAssignment& a, const ScenarioSpec& sc) {
    check_covers(ts, a);
    for (const auto& [id, rel] : sc.releases) {
        const auto idx = ts.find(id);
        if (!idx) throw ScenarioError("releases for unknown task " + id);
        const auto& t = ts.tasks()[*idx];
        for (size_t k = 0; k < rel.size(); ++k) {
            if (rel[k].is_negative()) throw ScenarioError("negative release for " + job_name(id, k));
            if (k > 0 && rel[k] - rel[k - 1] < t.period)
                throw ScenarioError("releases of " + id + " closer than its period at job " + std::to_string(k));
        }
    }

    std::optional<Rat> sw;
    switch (sc.switch_kind) {
        case SwitchKind::None: break;
        case SwitchKind::Explicit:
            if (sc.switch_at.is_negative()) throw ScenarioError("negative switch instant");
            if (sc.horizon && sc.switch_at > *sc.horizon) throw ScenarioError("switch instant beyond the horizon");
            sw = sc.switch_at;
            break;
        case SwitchKind::JobTriggered: {
            const auto idx = ts.find(sc.trigger_task);
            if (!idx || !ts.tasks()[*idx].is_hi()) throw ScenarioError("trigger must be a HI-task: " + sc.trigger_task);
            auto rel = sc.releases.find(sc.trigger_task);
            if (rel == sc.releases.end() || sc.trigger_job >= rel->second.size())
                throw ScenarioError("trigger job " + job_name(sc.trigger_task, sc.trigger_job) + " is never released");
            sw = lo_deadline_reach(ts.tasks()[*idx], a, rel->second[sc.trigger_job]);
            break;
        }
    }

    for (const auto& [id, per_job] : sc.demands) {
        const auto idx = ts.find(id);
        if (!idx) throw ScenarioError("demands for unknown task " + id);
        const auto& t = ts.tasks()[*idx];
        auto rel = sc.releases.find(id);
        for (const auto& [k, d] : per_job) {
            const std::string name = job_name(id, k);
            if (rel == sc.releases.end() || k >= rel->second.size())
                throw ScenarioError("demand for unreleased job " + name);
            if (!d.is_positive() || d > t.wcet_hi) throw ScenarioError("demand of " + name + " outside (0, C^H]");
            if (d <= t.wcet_lo) {
                if (sc.switch_kind == SwitchKind::JobTriggered && id == sc.trigger_task && k == sc.trigger_job)
                    throw ScenarioError("trigger job " + name + " does not overrun C^L");
                continue;
            }
            if (!sw) throw ScenarioError(name + " overruns C^L but the scenario has no switch");
            if (lo_deadline_reach(t, a, rel->second[k]) < *sw)
                throw ScenarioError(name + " would overrun C^L before the switch");
        }
    }
    return sw;
}

Rat default_horizon(const TaskSet& ts, const MultiRateAssignment& a, const ScenarioSpec& sc) {
    const auto sw = switch_instant(ts, a, sc);
    Rat h = Rat(2) * max_period(ts);
    if (sw) h += *sw + window_total(a);
    if (sc.horizon && *sc.horizon > h) h = *sc.horizon;
    return h;
}

Rat hi_mode_allocation(const MultiRateAssignment& a, const std::string& id, const Rat& x1, const Rat& x2) {
    if (x2 <= x1) return Rat(0);
    return allocation_after_switch(a, id, prefixes(a), x1, x2);
}

std::vector<Partition> build_partitions(const TaskSet& ts, const MultiRateAssignment& a, const ScenarioSpec& sc,
                                        const PartitionOptions& opt) {
    const Timeline tl = make_timeline(ts, a, sc, opt);
    Walker walk(tl);
    std::vector<Partition> out;
    std::vector<bool> active(ts.size());
    for (size_t b = 0; b + 1 < tl.boundaries.size(); ++b) {
        const Rat& t1 = tl.boundaries[b];
        for (size_t ti = 0; ti < ts.size(); ++ti) {
            const bool dropped = !ts.tasks()[ti].is_hi() && tl.switch_at && t1 >= *tl.switch_at;
            active[ti] = !dropped && walk.active(ti, t1, [](size_t) {}).has_value();
        }
        out.push_back(plan_partition(tl, t1, tl.boundaries[b + 1], active));
    }
    return out;
}

std::vector<Slice> mcnaughton_pack(const Partition& p, int m) {
    const Rat len = p.length();
    Rat total(0);
    for (const auto& al : p.allocations) {
        if (al.amount.is_negative()) throw std::invalid_argument("negative allocation for " + al.task);
        if (al.amount > len) throw std::invalid_argument("allocation for " + al.task + " exceeds the partition");
        total += al.amount;
    }
    if (total > Rat(m) * len) throw std::invalid_argument("allocations exceed platform capacity");

    std::vector<Slice> out;
    int core = 1;
    Rat pos = p.start;
    for (const auto& al : p.allocations) {
        Rat left = al.amount;
        while (left.is_positive()) {
            const Rat piece = min(left, p.end - pos);
            out.push_back({core, al.task, pos, pos + piece});
            left -= piece;
            pos += piece;
            if (pos == p.end) {
                ++core;
                pos = p.start;
            }
        }
    }
    return out;
}

SimulationResult simulate(const TaskSet& ts, const MultiRateAssignment& a, const ScenarioSpec& sc,
                          const SimulateOptions& opt) {
    const Timeline tl = make_timeline(ts, a, sc, opt.partitions);
    SimulationResult res;
    auto& trace = res.trace;
    trace.cores = ts.processors();
    trace.switch_at = tl.switch_at;

    // Job records in (task, index) order; rec_of[ti] is where task ti starts.
    std::vector<size_t> rec_of(ts.size());
    std::vector<std::vector<Rat>> done(ts.size());
    for (size_t ti = 0; ti < ts.size(); ++ti) {
        rec_of[ti] = trace.jobs.size();
        done[ti].assign(tl.jobs[ti].size(), Rat(0));
        for (const auto& j : tl.jobs[ti])
            trace.jobs.push_back({job_name(ts.tasks()[ti].id, j.index), ts.tasks()[ti].id, j.release, j.deadline,
                                  j.demand, std::nullopt, false});
    }

    Walker walk(tl);
    bool missed = false;
    auto check = [&](size_t ti, size_t k) {
        auto& rec = trace.jobs[rec_of[ti] + k];
        if (missed || rec.dropped || rec.completion) return;
        missed = true;
        res.verdict = {false, rec.job, rec.deadline};
    };

    std::vector<std::optional<size_t>> job_at(ts.size());
    std::vector<bool> active(ts.size());
    for (size_t b = 0; b < tl.boundaries.size(); ++b) {
        const Rat& t1 = tl.boundaries[b];
        for (size_t ti = 0; ti < ts.size(); ++ti) {
            job_at[ti] = walk.active(ti, t1, [&](size_t k) { check(ti, k); });
            if (missed) return res;
            if (job_at[ti] && !ts.tasks()[ti].is_hi() && tl.switch_at && t1 >= *tl.switch_at) {
                trace.jobs[rec_of[ti] + *job_at[ti]].dropped = true;
                job_at[ti].reset();
            }
            active[ti] = job_at[ti] && !trace.jobs[rec_of[ti] + *job_at[ti]].completion;
        }
        if (b + 1 == tl.boundaries.size()) break;

        Partition p = plan_partition(tl, t1, tl.boundaries[b + 1], active);
        std::vector<size_t> task_of;
        for (auto& al : p.allocations) {
            const size_t ti = *ts.find(al.task);
            const size_t k = *job_at[ti];
            al.amount = min(al.amount, tl.jobs[ti][k].demand - done[ti][k]);
            task_of.push_back(ti);
        }
        const auto slices = mcnaughton_pack(p, ts.processors());
        std::map<std::string, Rat> finish;
        for (const auto& s : slices) {
            auto& f = finish[s.task];
            f = max(f, s.end);
        }
        for (size_t q = 0; q < p.allocations.size(); ++q) {
            const size_t ti = task_of[q];
            const size_t k = *job_at[ti];
            done[ti][k] += p.allocations[q].amount;
            if (done[ti][k] == tl.jobs[ti][k].demand)
                trace.jobs[rec_of[ti] + k].completion = p.allocations[q].amount.is_positive() ? finish[p.allocations[q].task] : t1;
        }
        if (opt.record_slices) trace.slices.insert(trace.slices.end(), slices.begin(), slices.end());
    }
    return res;
}

std::optional<std::string> check_trace(const ScheduleTrace& trace) {
    std::vector<const Slice*> by_core, by_task;
    for (const auto& s : trace.slices) {
        if (s.end < s.start) return "slice of " + s.task + " ends before it starts";
        if (s.core < 1 || s.core > trace.cores) return "slice of " + s.task + " on core " + std::to_string(s.core);
        by_core.push_back(&s);
        by_task.push_back(&s);
    }
    std::sort(by_core.begin(), by_core.end(), [](const Slice* x, const Slice* y) {
        return x->core != y->core ? x->core < y->core : x->start < y->start;
    });
    for (size_t i = 1; i < by_core.size(); ++i)
        if (by_core[i]->core == by_core[i - 1]->core && by_core[i]->start < by_core[i - 1]->end)
            return "overlap on core " + std::to_string(by_core[i]->core) + " at " + by_core[i]->start.to_string();
    std::sort(by_task.begin(), by_task.end(), [](const Slice* x, const Slice* y) {
        return x->task != y->task ? x->task < y->task : x->start < y->start;
    });
    for (size_t i = 1; i < by_task.size(); ++i)
        if (by_task[i]->task == by_task[i - 1]->task && by_task[i]->start < by_task[i - 1]->end)
            return "task " + by_task[i]->task + " on two cores at " + by_task[i]->start.to_string();
    return std::nullopt;
}

std::vector<ScenarioSpec> adversarial_scenarios(const TaskSet& ts, const MultiRateAssignment& a, size_t random_count,
                                                uint64_t seed) {
    std::vector<ScenarioSpec> out;
    const Rat tail = Rat(2) * max_period(ts);
    const Rat transition = window_total(a);

    ScenarioSpec quiet;
    quiet.releases = synchronous_releases(ts, tail);
    out.push_back(quiet);
    if (ts.hi_count() == 0) return out;

    for (const auto& t : ts.tasks()) {
        if (!t.is_hi()) continue;
        ScenarioSpec sc;
        const Rat sw = t.wcet_lo / a.theta_lo.at(t.id);
        sc.releases = synchronous_releases(ts, sw + transition + tail);
        sc.switch_kind = SwitchKind::JobTriggered;
        sc.trigger_task = t.id;
        sc.trigger_job = 0;
        out.push_back(std::move(sc));
    }

    std::vector<Rat> S = prefixes(a);
    S.erase(S.begin());
    std::sort(S.begin(), S.end());
    S.erase(std::unique(S.begin(), S.end()), S.end());
    for (const auto& s : S) {
        if (!s.is_positive()) continue;
        ScenarioSpec sc;
        sc.releases = synchronous_releases(ts, s + transition + tail);
        sc.switch_kind = SwitchKind::Explicit;
        sc.switch_at = s;
        out.push_back(std::move(sc));
    }

    Rng rng(seed);
    auto hundredths = [&](const Rat& upto) {
        const long steps = static_cast<long>((upto * Rat(100)).to_double());
        return Rat(static_cast<long>(rng.uniform_int(0, std::max(0L, steps))), 100);
    };
    const Rat max_t = max_period(ts);
    for (size_t q = 0; q < random_count; ++q) {
        ScenarioSpec sc;
        sc.switch_kind = SwitchKind::Explicit;
        sc.switch_at = hundredths(max_t);
        const Rat until = sc.switch_at + transition + tail;
        for (const auto& t : ts.tasks()) {
            auto& r = sc.releases[t.id];
            Rat x = rng.uniform() < 0.5 ? Rat(0) : hundredths(t.period / Rat(2));
            while (x < until) {
                r.push_back(x);
                x += t.period;
                if (rng.uniform() < 0.5) x += hundredths(t.period / Rat(2));
            }
        }
        out.push_back(std::move(sc));
    }
    return out;
}

}  // namespace mcsched
