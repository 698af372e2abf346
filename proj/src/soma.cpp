#include "mcsched/soma.hpp"

#include "mcsched/lp.hpp"

#include <algorithm>
#include <numeric>

namespace mcsched {

std::vector<size_t> sort_hi_tasks(const TaskSet& ts) {
    std::vector<size_t> idx = ts.hi_indices();
    std::vector<Rat> key(ts.size());
    for (size_t i : idx) {
        const auto& t = ts.tasks()[i];
        key[i] = t.period - t.wcet_lo / task_utilizations(t).hi;
    }
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return key[a] < key[b]; });
    return idx;
}

namespace {

constexpr int kDigits = 9;
// Window boundaries sit this far before the deadline they track, so the
// tracking task's carry-over job completes in the following window.
constexpr double kShift = 1e-6;
// Capacity headroom: the search keeps more than materialization needs, so a
// point found feasible survives rounding rates up to 9 digits.
constexpr double kSearchHeadroom = 2e-6;
constexpr double kFinalHeadroom = 1e-6;
constexpr double kBudgetMargin = 1e-9;

enum class Layout { Shifted, Aligned };
constexpr Layout kLayouts[] = {Layout::Shifted, Layout::Aligned};

struct HiTask {
    const MCTask* task;
    double T, CL, CH, uH;
    Rat uL_exact, uH_exact;
    double r_lo, r_hi;
};

struct Plan {
    std::vector<double> S;  // S[0] = 0, S[j] = w_1 + ... + w_j
    std::vector<size_t> k;  // earliest completion window per HI-task
};

struct Rates {
    std::vector<std::vector<double>> pre;  // cumulative rates for windows 1..k-1
    std::vector<double> extra;             // own-window (or stable) rate above the floor
};

class Solver {
public:
    Solver(const TaskSet& ts, const std::vector<size_t>& ordering) : ts_(ts), m_(ts.processors()) {
        std::vector<size_t> hi = ordering;
        // ordering must be a permutation of the HI-tasks
        std::vector<size_t> expect = ts.hi_indices(), got = hi;
        std::sort(got.begin(), got.end());
        if (got != expect) hi = sort_hi_tasks(ts);
        for (size_t i : hi) {
            const auto& t = ts.tasks()[i];
            const auto u = task_utilizations(t);
            tasks_.push_back({&t, t.period.to_double(), t.wcet_lo.to_double(), t.wcet_hi.to_double(),
                              u.hi.to_double(), u.lo, u.hi, 0.0, 0.0});
        }
        for (const auto& t : ts.tasks())
            if (!t.is_hi()) lo_sum_ += task_utilizations(t).lo;
    }

    size_t size() const { return tasks_.size(); }
    HiTask& operator[](size_t i) { return tasks_[i]; }
    const Rat& lo_sum() const { return lo_sum_; }

    double theta_lo(size_t i, double r) const { return tasks_[i].CL / (tasks_[i].T - r); }

    double objective(const std::vector<double>& r) const {
        double s = 0;
        for (size_t i = 0; i < tasks_.size(); ++i) s += theta_lo(i, r[i]);
        return s;
    }

    Plan layout(const std::vector<double>& r, Layout how) const {
        const size_t n = tasks_.size();
        std::vector<size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return r[a] < r[b]; });
        Plan p;
        p.S.assign(n + 1, 0.0);
        for (size_t j = 1; j <= n; ++j) {
            const double target = how == Layout::Shifted ? r[order[j - 1]] - kShift : r[order[j - 1]];
            p.S[j] = std::max(p.S[j - 1], target);
        }
        p.k = completion(r, p.S);
        return p;
    }

    static std::vector<size_t> completion(const std::vector<double>& r, const std::vector<double>& S) {
        const size_t n = r.size();
        std::vector<size_t> k(n, n + 1);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 1; j <= n; ++j)
                if (S[j] >= r[i]) {
                    k[i] = j;
                    break;
                }
        return k;
    }

    // Linear feasibility of the HI-mode rates for fixed LO rates and windows.
    // Variables per HI-task: non-negative increments of its rate across the
    // windows before k (so the rates are non-decreasing there), then the
    // excess of its own-window rate over max(u^H, theta^L). Later windows and
    // the stable rate sit at that floor. With `minimal` the rates are also
    // pushed as low as possible, leaving room for rounding up.
    std::optional<Rates> hi_rates(const std::vector<double>& r, const std::vector<double>& theta_lo, const Plan& p,
                                  double headroom, bool minimal) const {
        const size_t n = tasks_.size();
        std::vector<size_t> first(n);
        size_t nvars = 0;
        for (size_t i = 0; i < n; ++i) {
            first[i] = nvars;
            nvars += p.k[i];  // k-1 increments + 1 extra
        }
        std::vector<double> floor(n);
        for (size_t i = 0; i < n; ++i) floor[i] = std::max(tasks_[i].uH, theta_lo[i]);

        std::vector<std::vector<double>> A;
        std::vector<double> b;
        auto row = [&]() -> std::vector<double>& {
            A.emplace_back(nvars, 0.0);
            return A.back();
        };

        for (size_t i = 0; i < n; ++i) {
            const auto& t = tasks_[i];
            const size_t k = p.k[i], pre = k - 1, e = first[i] + pre;
            const double before = p.S[k - 1];
            const double tail = std::max(0.0, r[i] - before);
            const double need = t.CH - t.CL;

            auto& budget = row();  // carry-over budget, negated to <=
            for (size_t l = 1; l <= pre; ++l) budget[first[i] + l - 1] = -(before - p.S[l - 1]);
            budget[e] = -tail;
            b.push_back(-(need - floor[i] * tail) - kBudgetMargin * (1.0 + need));

            if (pre > 0) {
                auto& avg = row();  // average rate before k at least u^H
                for (size_t l = 1; l <= pre; ++l) avg[first[i] + l - 1] = -(before - p.S[l - 1]);
                b.push_back(-t.uH * before - kBudgetMargin * (1.0 + before));

                auto& cap = row();
                for (size_t l = 1; l <= pre; ++l) cap[first[i] + l - 1] = 1.0;
                b.push_back(1.0);
            }
            auto& own = row();
            own[e] = 1.0;
            b.push_back(std::max(0.0, 1.0 - floor[i]));
        }

        const double m = static_cast<double>(m_) - headroom;
        for (size_t j = 1; j <= n + 1; ++j) {
            auto& cap = row();
            double fixed = 0.0;
            bool any = false;
            for (size_t i = 0; i < n; ++i) {
                const size_t k = p.k[i];
                if (j < k) {
                    for (size_t l = 1; l <= j; ++l) cap[first[i] + l - 1] = 1.0;
                    any = true;
                } else {
                    fixed += floor[i];
                    if (j == k) {
                        cap[first[i] + k - 1] = 1.0;
                        any = true;
                    }
                }
            }
            if (m - fixed < 0.0) return std::nullopt;
            if (!any) {
                A.pop_back();
                continue;
            }
            b.push_back(m - fixed);
        }

        std::vector<double> c(nvars, minimal ? -1.0 : 0.0), x;
        double obj = 0;
        LinearProgram lp(A, b, c);
        if (lp.solve(x, obj) != LinearProgram::Status::Optimal) return std::nullopt;

        Rates out;
        out.pre.resize(n);
        out.extra.resize(n);
        for (size_t i = 0; i < n; ++i) {
            double cum = 0.0;
            for (size_t l = 0; l + 1 < p.k[i]; ++l) {
                cum += x[first[i] + l];
                out.pre[i].push_back(cum);
            }
            out.extra[i] = x[first[i] + p.k[i] - 1];
        }
        return out;
    }

    std::optional<Layout> feasible(const std::vector<double>& r) {
        ++evaluations;
        std::vector<double> tl(r.size());
        for (size_t i = 0; i < r.size(); ++i) tl[i] = theta_lo(i, r[i]);
        for (Layout how : kLayouts)
            if (hi_rates(r, tl, layout(r, how), kSearchHeadroom, false)) return how;
        return std::nullopt;
    }

    // Exact assignment for search point r, validated by the sufficient test
    // with the LO platform check disabled.
    std::optional<MultiRateAssignment> materialize(const std::vector<double>& r, Layout how) const {
        const size_t n = tasks_.size();
        const Rat one(1);
        std::vector<Rat> tl(n), rem(n);
        std::vector<double> tl_d(n), rem_d(n);
        for (size_t i = 0; i < n; ++i) {
            const auto& t = tasks_[i];
            Rat v = Rat::ceil_decimal(theta_lo(i, r[i]), kDigits);
            v = min(one, max(t.uL_exact, v));
            tl[i] = v;
            rem[i] = hi_mode_remaining(*t.task, v);
            tl_d[i] = v.to_double();
            rem_d[i] = rem[i].to_double();
        }

        const Plan approx = layout(rem_d, how);
        std::vector<Rat> S(n + 1, Rat(0));
        for (size_t j = 1; j <= n; ++j) {
            const Rat s = how == Layout::Shifted ? Rat::floor_decimal(approx.S[j], kDigits)
                                                 : Rat::ceil_decimal(approx.S[j], kDigits);
            S[j] = max(S[j - 1], max(Rat(0), s));
        }
        MultiRateAssignment a;
        for (size_t j = 1; j <= n; ++j) a.windows.push_back(S[j] - S[j - 1]);

        Plan exact;
        exact.S.resize(n + 1);
        for (size_t j = 0; j <= n; ++j) exact.S[j] = S[j].to_double();
        exact.k.resize(n);
        for (size_t i = 0; i < n; ++i)
            exact.k[i] = rem[i].is_zero() ? 1 : earliest_completion_window(*tasks_[i].task, tl[i], a.windows);

        const auto rates = hi_rates(rem_d, tl_d, exact, kFinalHeadroom, true);
        if (!rates) return std::nullopt;

        for (size_t i = 0; i < n; ++i) {
            const auto& t = tasks_[i];
            const std::string& id = t.task->id;
            const Rat floor = max(t.uH_exact, tl[i]);
            const size_t k = exact.k[i];
            std::vector<Rat> trans;
            for (size_t j = 1; j <= n; ++j) {
                if (j < k) trans.push_back(min(one, max(Rat(0), Rat::ceil_decimal(rates->pre[i][j - 1], kDigits))));
                else if (j == k) trans.push_back(min(one, max(floor, Rat::ceil_decimal(floor.to_double() + rates->extra[i], kDigits))));
                else trans.push_back(floor);
            }
            a.theta_hi[id] = k == n + 1
                                 ? min(one, max(floor, Rat::ceil_decimal(floor.to_double() + rates->extra[i], kDigits)))
                                 : floor;
            a.theta_trans[id] = std::move(trans);
            a.theta_lo[id] = tl[i];
        }
        for (const auto& t : ts_.tasks())
            if (!t.is_hi()) a.theta_lo[t.id] = task_utilizations(t).lo;

        if (!multi_rate_test(ts_, a, {.lo_platform = false})) return std::nullopt;
        return a;
    }

    int evaluations = 0;

private:
    const TaskSet& ts_;
    int m_;
    std::vector<HiTask> tasks_;
    Rat lo_sum_{0};
};

Rat lo_rate_sum(const MultiRateAssignment& a) {
    Rat s(0);
    for (const auto& [id, r] : a.theta_lo) s += r;
    return s;
}

// Lower bound on sum theta^L over all tasks: a carry-over job can receive at
// most r_i time after the switch, so r_i >= C^H - C^L.
Rat lo_rate_floor(const TaskSet& ts) {
    Rat s(0);
    for (const auto& t : ts.tasks()) {
        const Rat slack = t.period - (t.wcet_hi - t.wcet_lo);
        s += t.is_hi() && slack.is_positive() ? max(task_utilizations(t).lo, t.wcet_lo / slack)
                                              : task_utilizations(t).lo;
    }
    return s;
}

// Local search over the remaining HI-mode times r_i = T_i - C_i^L/theta_i^L,
// starting from the dual-rate seed. Lower r means lower theta^L.
class Search {
public:
    Search(Solver& solver, const DualRateAssignment& seed, const SomaOptions& opt, double m)
        : s_(solver), opt_(opt), m_(m), n_(solver.size()) {
        r_lo_.resize(n_);
        r_hi_.resize(n_);
        r_max_.resize(n_);
        for (size_t i = 0; i < n_; ++i) {
            auto& t = s_[i];
            r_hi_[i] = t.T - t.CL / seed.theta_lo.at(t.task->id).to_double();
            r_lo_[i] = std::min(r_hi_[i], std::max(0.0, t.CH - t.CL));
            r_max_[i] = std::max(r_hi_[i], t.T - t.CL);
            t.r_lo = r_lo_[i];
            t.r_hi = r_hi_[i];
        }
        cur_ = r_hi_;
        lo_fixed_ = s_.lo_sum().to_double();
    }

    // True when an early-accepted candidate is stored in `accepted`.
    bool run() {
        double prev = s_.objective(cur_);
        for (int sweep = 0; sweep < opt_.max_iters && budget_left(); ++sweep) {
            for (size_t i : by_gradient(true)) {
                if (!budget_left()) break;
                if (lower(cur_, i)) return true;
            }
            if (done_) return true;
            double now = s_.objective(cur_);
            if (prev - now <= opt_.tol * prev) {
                if (exchange()) return true;
                now = s_.objective(cur_);
                if (prev - now <= opt_.tol * prev) break;
            }
            prev = now;
        }
        return false;
    }

    // Exact candidate for the best point found, backing off toward the seed
    // if rounding to decimals breaks it.
    std::optional<MultiRateAssignment> finish() {
        if (!layout_) return std::nullopt;
        for (double t : {0.0, 0.125, 0.25, 0.5}) {
            std::vector<double> r(n_);
            for (size_t i = 0; i < n_; ++i) r[i] = cur_[i] + t * (r_hi_[i] - cur_[i]);
            std::optional<MultiRateAssignment> a;
            if (t == 0.0) a = s_.materialize(r, *layout_);
            else if (auto how = s_.feasible(r)) a = s_.materialize(r, *how);
            if (a) return a;
        }
        return std::nullopt;
    }

    std::optional<MultiRateAssignment> accepted;

private:
    bool budget_left() const { return s_.evaluations < kSomaEvaluationCap; }

    double resolution(size_t i) const { return 1e-3 * (r_hi_[i] - r_lo_[i]) + 1e-12; }

    std::vector<size_t> by_gradient(bool descending) const {
        std::vector<double> g(n_);
        for (size_t i = 0; i < n_; ++i) {
            const double th = s_.theta_lo(i, cur_[i]);
            g[i] = th * th / s_[i].CL;
        }
        std::vector<size_t> idx(n_);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](size_t a, size_t b) { return descending ? g[a] > g[b] : g[a] < g[b]; });
        return idx;
    }

    // Feasibility with bookkeeping; a feasible probe may end the search.
    std::optional<Layout> probe(const std::vector<double>& r) {
        auto how = s_.feasible(r);
        if (!how || !opt_.early_accept) return how;
        if (s_.objective(r) + lo_fixed_ > m_ - kFinalHeadroom) return how;
        auto a = s_.materialize(r, *how);
        if (a && lo_rate_sum(*a) <= Rat(static_cast<long>(m_))) {
            accepted = std::move(a);
            done_ = true;
        }
        return how;
    }

    // Bisect r[i] down within [r_lo, r[i]] keeping the rest of r fixed.
    // Updates r (and the current layout when r is cur_).
    bool lower(std::vector<double>& r, size_t i, std::optional<Layout>* how_out = nullptr) {
        double lo = r_lo_[i], hi = r[i];
        bool first = true;
        while (hi - lo > resolution(i) && budget_left()) {
            auto trial = r;
            trial[i] = first ? std::min(hi, lo + resolution(i)) : 0.5 * (lo + hi);
            first = false;
            if (auto how = probe(trial)) {
                hi = trial[i];
                r = trial;
                if (&r == &cur_) layout_ = how;
                if (how_out) *how_out = how;
                if (done_) return true;
            } else {
                lo = trial[i];
            }
        }
        return false;
    }

    // Give one low-gradient task more HI-mode time, lower a high-gradient
    // task against it, then pull the first back down. Keeps the move if the
    // objective drops.
    bool exchange() {
        const auto desc = by_gradient(true), asc = by_gradient(false);
        const size_t width = std::min<size_t>(n_, 3);
        for (size_t a = 0; a < width; ++a) {
            for (size_t b = 0; b < width; ++b) {
                const size_t i = desc[a], j = asc[b];
                if (i == j || !budget_left()) continue;
                auto trial = cur_;
                trial[j] = cur_[j] + 0.5 * (r_max_[j] - cur_[j]);
                const double before_i = trial[i];
                std::optional<Layout> how;
                if (lower(trial, i, &how)) return true;
                if (trial[i] >= before_i - resolution(i)) continue;
                if (lower(trial, j, &how)) return true;
                if (how && s_.objective(trial) < s_.objective(cur_) * (1.0 - opt_.tol)) {
                    cur_ = trial;
                    layout_ = how;
                    return false;
                }
            }
        }
        return false;
    }

    Solver& s_;
    const SomaOptions& opt_;
    double m_;
    size_t n_;
    std::vector<double> r_lo_, r_hi_, r_max_, cur_;
    std::optional<Layout> layout_;
    double lo_fixed_ = 0.0;
    bool done_ = false;
};

}  // namespace

std::optional<MultiRateAssignment> solve_assignment(const TaskSet& ts, const std::vector<size_t>& ordering,
                                                    const SomaOptions& opt, SomaDiagnostics* diag) {
    SomaDiagnostics local;
    SomaDiagnostics& d = diag ? *diag : local;
    d = {};

    const auto seed = dual_rate_minimize(ts);
    if (!seed) return std::nullopt;
    MultiRateAssignment best = embed_dual_rate(ts, *seed);
    if (!multi_rate_test(ts, best, {.lo_platform = false})) return std::nullopt;
    Rat best_obj = hi_lo_rate_sum(ts, best.theta_lo);
    d.seed_used = true;
    d.objective = best_obj.to_double();

    const Rat m(ts.processors());
    const size_t n = ts.hi_count();
    if (opt.seed_only || n <= static_cast<size_t>(ts.processors())) return best;
    if (opt.early_accept && (lo_rate_sum(best) <= m || lo_rate_floor(ts) > m)) return best;

    Solver solver(ts, ordering);
    Search search(solver, *seed, opt, static_cast<double>(ts.processors()));
    const bool accepted = search.run();
    d.iterations = solver.evaluations;

    if (accepted) {
        best = std::move(*search.accepted);
    } else {
        auto found = search.finish();
        d.iterations = solver.evaluations;
        if (!found) return best;
        const Rat obj = hi_lo_rate_sum(ts, found->theta_lo);
        if (obj >= best_obj) return best;
        best = std::move(*found);
    }
    d.seed_used = false;
    d.objective = hi_lo_rate_sum(ts, best.theta_lo).to_double();
    return best;
}

SomaOutcome soma(const TaskSet& ts, const SomaOptions& opt) {
    SomaOutcome out;
    auto a = solve_assignment(ts, sort_hi_tasks(ts), opt, &out.diagnostics);
    if (!a) return out;
    Rat s(0);
    for (const auto& [id, r] : a->theta_lo) s += r;
    if (s > Rat(ts.processors())) return out;
    out.success = true;
    out.assignment = std::move(a);
    return out;
}

}  // namespace mcsched
