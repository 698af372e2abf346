#include "mcsched/dualrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mcsched {

namespace {

constexpr int kRateDigits = 9;

bool in_unit_interval(const Rat& r) { return r.is_positive() && r <= Rat(1); }

}  // namespace

std::string to_string(DualCondition c) {
    switch (c) {
        case DualCondition::LoTaskRate: return "lo-task-rate";
        case DualCondition::HiTaskBudget: return "hi-task-budget";
        case DualCondition::HiRateOrder: return "hi-rate-order";
        case DualCondition::LoPlatform: return "lo-platform";
        case DualCondition::HiPlatform: return "hi-platform";
    }
    return "?";
}

std::string describe(const DualVerdict& v) {
    if (v.schedulable) return "schedulable";
    std::string s = "failed(" + to_string(v.failed) + ")";
    if (!v.task_id.empty()) s += " task " + v.task_id;
    return s;
}

void check_covers(const TaskSet& ts, const DualRateAssignment& a) {
    size_t hi = 0;
    for (const auto& t : ts.tasks()) {
        auto lo_it = a.theta_lo.find(t.id);
        if (lo_it == a.theta_lo.end()) throw AssignmentError("missing thetaL for task " + t.id);
        if (!in_unit_interval(lo_it->second)) throw AssignmentError("thetaL outside (0,1] for task " + t.id);
        auto hi_it = a.theta_hi.find(t.id);
        if (t.is_hi()) {
            ++hi;
            if (hi_it == a.theta_hi.end()) throw AssignmentError("missing thetaH for HI task " + t.id);
            if (!in_unit_interval(hi_it->second))
                throw AssignmentError("thetaH outside (0,1] for task " + t.id);
        } else if (hi_it != a.theta_hi.end()) {
            throw AssignmentError("thetaH given for LO task " + t.id);
        }
    }
    if (a.theta_lo.size() != ts.size()) throw AssignmentError("thetaL names tasks not in the set");
    if (a.theta_hi.size() != hi) throw AssignmentError("thetaH names tasks not in the set");
}

DualVerdict dual_rate_test(const TaskSet& ts, const DualRateAssignment& a) {
    check_covers(ts, a);
    const auto& tasks = ts.tasks();

    for (const auto& t : tasks)
        if (a.theta_lo.at(t.id) < task_utilizations(t).lo) return {false, DualCondition::LoTaskRate, t.id};

    for (const auto& t : tasks) {
        if (!t.is_hi()) continue;
        const auto u = task_utilizations(t);
        const Rat lhs = u.lo / a.theta_lo.at(t.id) + (u.hi - u.lo) / a.theta_hi.at(t.id);
        if (lhs > Rat(1)) return {false, DualCondition::HiTaskBudget, t.id};
    }

    for (const auto& t : tasks)
        if (t.is_hi() && a.theta_hi.at(t.id) < a.theta_lo.at(t.id))
            return {false, DualCondition::HiRateOrder, t.id};

    Rat lo_sum(0), hi_sum(0);
    for (const auto& [id, r] : a.theta_lo) lo_sum += r;
    for (const auto& [id, r] : a.theta_hi) hi_sum += r;
    const Rat m(ts.processors());
    if (lo_sum > m) return {false, DualCondition::LoPlatform, ""};
    if (hi_sum > m) return {false, DualCondition::HiPlatform, ""};
    return {};
}

Rat hi_lo_rate_sum(const TaskSet& ts, const std::map<std::string, Rat>& theta_lo) {
    Rat s(0);
    for (const auto& t : ts.tasks())
        if (t.is_hi()) s += theta_lo.at(t.id);
    return s;
}

// Eliminating theta^L through the per-task budget boundary gives, per HI-task,
//   f(x) = a x / (x - d),  x = theta^H in [b, 1],  a = u^L, b = u^H, d = b - a,
// which is decreasing and convex. Minimizing sum f subject to sum x <= m is a
// separable convex program; its KKT point is x(lambda) = d + sqrt(a d / lambda)
// clamped to [b, 1], with lambda chosen so the capacity is met.
std::optional<DualRateAssignment> dual_rate_minimize(const TaskSet& ts) {
    DualRateAssignment out;
    const Rat m(ts.processors());

    Rat hi_util(0);
    for (const auto& t : ts.tasks())
        if (t.is_hi()) hi_util += task_utilizations(t).hi;
    if (hi_util > m) return std::nullopt;

    struct Flex {
        const MCTask* task;
        Rat a, b, d;
        double ad, bd, dd;
        double x = 1.0;
    };
    std::vector<Flex> flex;
    Rat fixed(0);
    for (const auto& t : ts.tasks()) {
        const auto u = task_utilizations(t);
        if (!t.is_hi()) {
            out.theta_lo[t.id] = u.lo;
            continue;
        }
        if (u.lo == u.hi) {
            out.theta_lo[t.id] = u.lo;
            out.theta_hi[t.id] = u.hi;
            fixed += u.hi;
            continue;
        }
        const Rat d = u.hi - u.lo;
        flex.push_back({&t, u.lo, u.hi, d, u.lo.to_double(), u.hi.to_double(), d.to_double()});
    }

    const Rat capacity = m - fixed;
    const double cap = capacity.to_double();

    auto x_at = [](const Flex& f, double lambda) {
        const double x = f.dd + std::sqrt(f.ad * f.dd / lambda);
        return std::clamp(x, f.bd, 1.0);
    };

    if (Rat(static_cast<long>(flex.size())) > capacity) {
        double lo = std::numeric_limits<double>::max(), hi = 0.0;
        for (const auto& f : flex) {
            lo = std::min(lo, f.ad * f.dd / ((1.0 - f.dd) * (1.0 - f.dd)));
            hi = std::max(hi, f.dd / f.ad);
        }
        lo = std::log(lo) - 1.0;
        hi = std::log(hi) + 1.0;
        auto total = [&](double log_lambda) {
            double s = 0.0;
            const double lambda = std::exp(log_lambda);
            for (const auto& f : flex) s += x_at(f, lambda);
            return s;
        };
        // total() is non-increasing in lambda; keep `hi` on the feasible side.
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (total(mid) <= cap) hi = mid;
            else lo = mid;
        }
        const double lambda = std::exp(hi);
        for (auto& f : flex) f.x = x_at(f, lambda);
    }

    Rat hi_sum = fixed;
    std::vector<Rat> theta_hi;
    theta_hi.reserve(flex.size());
    for (const auto& f : flex) {
        theta_hi.push_back(max(f.b, Rat::floor_decimal(f.x, kRateDigits)));
        hi_sum += theta_hi.back();
    }
    // Float noise can leave the exact sum a few ulps above m.
    const Rat step(1L, 1000000000L);
    for (size_t i = 0; hi_sum > m && !flex.empty(); i = (i + 1) % flex.size()) {
        if (theta_hi[i] - step >= flex[i].b) {
            theta_hi[i] -= step;
            hi_sum -= step;
        }
    }

    for (size_t i = 0; i < flex.size(); ++i) {
        const auto& f = flex[i];
        const Rat& th = theta_hi[i];
        const Rat boundary = f.a * th / (th - f.d);
        out.theta_hi[f.task->id] = th;
        out.theta_lo[f.task->id] = min(th, boundary.ceil_to(kRateDigits));
    }
    return out;
}

std::optional<DualRateAssignment> dual_rate_assign(const TaskSet& ts) {
    auto a = dual_rate_minimize(ts);
    if (!a || !dual_rate_test(ts, *a)) return std::nullopt;
    return a;
}

}  // namespace mcsched
