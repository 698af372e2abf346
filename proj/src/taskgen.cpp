#include "mcsched/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace mcsched {

void GeneratorConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("generator config: " + msg); };
    if (m < 1) fail("m must be positive");
    if (!u_min.is_positive() || !(u_min < u_max) || u_max > Rat(1)) fail("need 0 < u_min < u_max <= 1");
    if (!target_bound.is_positive() || target_bound > Rat(1)) fail("target bound must lie in (0, 1]");
    if (!(hi_fraction > 0.0 && hi_fraction <= 1.0)) fail("HI fraction must lie in (0, 1]");
    if (tasks_min() < 1 || tasks_min() > tasks_max()) fail("empty task-count range");
    if (hi_min() < 1 || hi_min() > hi_max()) fail("empty HI-count range");
    if (hi_min() > tasks_max()) fail("HI-count range exceeds task-count range");
    if (!period_min.is_positive() || period_min > period_max) fail("empty period range");
    if (lo_of_lo && (lo_of_lo->is_negative() || *lo_of_lo > target_bound))
        fail("pinned U_L^L outside [0, target bound]");
}

namespace {

// Uniform sample from {x in [0,1]^n : sum x = s}, n >= 2 (Stafford's
// randfixedsum, one column).
std::vector<double> unit_fixed_sum(size_t n, double s, Rng& rng) {
    const int ni = static_cast<int>(n);
    const int k = std::clamp(static_cast<int>(std::floor(s)), 0, ni - 1);
    s = std::clamp(s, static_cast<double>(k), static_cast<double>(k + 1));

    std::vector<double> s1(n), s2(n);
    for (int i = 0; i < ni; ++i) {
        s1[i] = s - (k - i);
        s2[i] = (k + ni - i) - s;
    }

    // w(i, c): scaled volumes; t(i, c): branch probabilities.
    std::vector<std::vector<double>> w(n, std::vector<double>(n + 1, 0.0));
    std::vector<std::vector<double>> t(n - 1, std::vector<double>(n, 0.0));
    w[0][1] = 1.0;
    constexpr double tiny = 0x1.0p-1074;
    for (int i = 2; i <= ni; ++i) {
        for (int c = 1; c <= i; ++c) {
            const double a = w[i - 2][c] * s1[c - 1] / i;
            const double b = w[i - 2][c - 1] * s2[ni - i + c - 1] / i;
            w[i - 1][c] = a + b;
            const double denom = w[i - 1][c] + tiny;
            t[i - 2][c - 1] = s2[ni - i + c - 1] > s1[c - 1] ? b / denom : 1.0 - a / denom;
        }
    }

    std::vector<double> x(n);
    double sm = 0.0, pr = 1.0;
    int j = k + 1;
    for (int i = ni - 1; i >= 1; --i) {
        const int col = std::clamp(j, 1, i);
        const bool e = rng.uniform() <= t[i - 1][col - 1];
        const double sx = std::pow(rng.uniform(), 1.0 / i);
        sm += (1.0 - sx) * pr * s / (i + 1);
        pr *= sx;
        x[ni - i - 1] = sm + pr * (e ? 1.0 : 0.0);
        if (e) {
            s -= 1.0;
            --j;
        }
    }
    x[n - 1] = sm + pr * s;

    for (size_t i = n - 1; i > 0; --i) std::swap(x[i], x[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(i)))]);
    return x;
}

// Rounds each value to `digits` decimals inside [lo_i, hi_i], then moves the
// residual to the trailing elements so the sum is exactly `total`.
std::vector<Rat> snap_to_sum(const std::vector<double>& x, const Rat& total, const std::vector<Rat>& lo,
                             const std::vector<Rat>& hi, int digits) {
    std::vector<Rat> out(x.size());
    Rat sum(0);
    for (size_t i = 0; i < x.size(); ++i) {
        out[i] = std::clamp(Rat::round_decimal(x[i], digits), lo[i], hi[i]);
        sum += out[i];
    }
    Rat diff = total - sum;
    for (size_t i = x.size(); i-- > 0 && !diff.is_zero();) {
        const Rat adj = diff.is_positive() ? min(diff, hi[i] - out[i]) : max(diff, lo[i] - out[i]);
        out[i] += adj;
        diff -= adj;
    }
    if (!diff.is_zero()) throw std::logic_error("snap_to_sum: bounds cannot absorb the rounding residual");
    return out;
}

// LO-mode utilizations for HI-tasks: draw uniformly below each u^H, rescale to
// the target sum and redraw on overflow. After a fixed number of redraws the
// overflow is clipped and handed to the others in proportion to headroom.
std::vector<Rat> bounded_uniform(const std::vector<Rat>& upper, const Rat& total, const Rat& lo, Rng& rng,
                                 int digits) {
    const size_t n = upper.size();
    std::vector<double> room(n);
    for (size_t i = 0; i < n; ++i) room[i] = (upper[i] - lo).to_double();
    const double target = (total - Rat(static_cast<long>(n)) * lo).to_double();

    std::vector<double> y(n);
    auto draw = [&] {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += (y[i] = rng.uniform() * room[i]);
        if (s <= 0.0) return false;
        for (auto& v : y) v *= target / s;
        return true;
    };
    constexpr int kRedraws = 100;
    bool ok = false;
    for (int attempt = 0; attempt < kRedraws && !ok; ++attempt) {
        if (!draw()) continue;
        ok = std::all_of(y.begin(), y.end(), [&, i = size_t{0}](double v) mutable { return v <= room[i++]; });
    }
    if (!ok) {
        if (!draw()) y = room;
        double excess = 0.0, headroom = 0.0;
        for (size_t i = 0; i < n; ++i) {
            if (y[i] > room[i]) {
                excess += y[i] - room[i];
                y[i] = room[i];
            }
            headroom += room[i] - y[i];
        }
        if (headroom > 0.0)
            for (size_t i = 0; i < n; ++i) y[i] += excess * (room[i] - y[i]) / headroom;
    }

    std::vector<double> x(n);
    for (size_t i = 0; i < n; ++i) x[i] = lo.to_double() + y[i];
    return snap_to_sum(x, total, std::vector<Rat>(n, lo), upper, digits);
}

const Rat kGridStep(1, 20);

}  // namespace

std::vector<Rat> rand_fixed_sum(size_t count, const Rat& total, const Rat& lo, const Rat& hi, Rng& rng,
                                int digits) {
    const Rat n(static_cast<long>(count));
    if (hi < lo || total < n * lo || total > n * hi)
        throw std::invalid_argument("rand_fixed_sum: need count*lo <= total <= count*hi");
    if (count == 0) return {};
    if (count == 1) return {total};
    if (lo == hi) return std::vector<Rat>(count, lo);

    const Rat width = hi - lo;
    const double s = ((total - n * lo) / width).to_double();
    std::vector<double> x = unit_fixed_sum(count, s, rng);
    for (auto& v : x) v = lo.to_double() + width.to_double() * v;
    return snap_to_sum(x, total, std::vector<Rat>(count, lo), std::vector<Rat>(count, hi), digits);
}

std::vector<UtilizationTarget> utilization_targets(const Rat& bound, const std::optional<Rat>& lo_of_lo) {
    const Rat min_hh(1, 10), min_part(1, 20), one(1);
    std::vector<UtilizationTarget> out;
    if (bound > one) return out;
    auto lo_ok = [&](const Rat& hl, const Rat& ll) {
        if (lo_of_lo ? ll != *lo_of_lo : ll < min_part) return false;
        return ll <= one - hl;
    };

    // U_H^H attains the bound.
    if (bound >= min_hh)
        for (Rat hl = min_part; hl <= bound; hl += kGridStep)
            for (Rat ll = lo_of_lo.value_or(min_part); hl + ll <= bound; ll += kGridStep) {
                if (lo_ok(hl, ll)) out.push_back({bound, hl, ll});
                if (lo_of_lo) break;
            }

    // U_H^L + U_L^L attains the bound with U_H^H strictly below it.
    auto add_lo_split = [&](const Rat& hl) {
        const Rat ll = bound - hl;
        if (hl < min_part || !lo_ok(hl, ll)) return;
        for (Rat hh = min_hh; hh < bound; hh += kGridStep)
            if (hh >= hl) out.push_back({hh, hl, ll});
    };
    if (lo_of_lo) add_lo_split(bound - *lo_of_lo);
    else
        for (Rat hl = min_part; hl < bound; hl += kGridStep) add_lo_split(hl);
    return out;
}

TaskSet generate(const GeneratorConfig& cfg) {
    cfg.validate();
    const auto targets = utilization_targets(cfg.target_bound, cfg.lo_of_lo);
    if (targets.empty())
        throw GenerationError("no utilization triple attains bound " + cfg.target_bound.to_string());

    Rng rng(cfg.seed);
    const Rat m(cfg.m);
    const long period_steps = std::lround(std::floor(((cfg.period_max - cfg.period_min) * Rat(100)).to_double()));

    for (int attempt = 0; attempt < kGenerationAttempts; ++attempt) {
        const auto& tgt = targets[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(targets.size()) - 1))];
        const int n_hi = static_cast<int>(rng.uniform_int(cfg.hi_min(), cfg.hi_max()));

        // Stochastic rounding keeps E[n_lo] = n_hi (1 - P_H) / P_H.
        const double want = n_hi * (1.0 - cfg.hi_fraction) / cfg.hi_fraction;
        int n_lo = static_cast<int>(std::floor(want));
        if (rng.uniform() < want - n_lo) ++n_lo;
        if (tgt.lo_of_lo.is_zero()) n_lo = 0;
        else n_lo = std::max(n_lo, 1);
        n_lo = std::max(n_lo, cfg.tasks_min() - n_hi);
        n_lo = std::min(n_lo, cfg.tasks_max() - n_hi);
        if (n_lo < 0 || (n_lo == 0 && !tgt.lo_of_lo.is_zero())) continue;

        const Rat nh(n_hi), nl(n_lo);
        const Rat hh = m * tgt.hi_of_hi, hl = m * tgt.lo_of_hi, ll = m * tgt.lo_of_lo;
        if (hh < nh * cfg.u_min || hh > nh * cfg.u_max) continue;
        if (hl < nh * cfg.u_min) continue;
        if (ll < nl * cfg.u_min || ll > nl * cfg.u_max) continue;

        const auto u_hi = rand_fixed_sum(n_hi, hh, cfg.u_min, cfg.u_max, rng);
        const auto u_lo_hi = bounded_uniform(u_hi, hl, cfg.u_min, rng, kUtilizationDigits);
        const auto u_lo = rand_fixed_sum(n_lo, ll, cfg.u_min, cfg.u_max, rng);

        std::vector<MCTask> tasks;
        tasks.reserve(n_hi + n_lo);
        auto period = [&] { return cfg.period_min + Rat(static_cast<long>(rng.uniform_int(0, period_steps)), 100); };
        for (int i = 0; i < n_hi; ++i) {
            const Rat T = period();
            tasks.push_back({"t" + std::to_string(tasks.size() + 1), T, Criticality::HI, u_lo_hi[i] * T, u_hi[i] * T});
        }
        for (int i = 0; i < n_lo; ++i) {
            const Rat T = period();
            const Rat c = u_lo[i] * T;
            tasks.push_back({"t" + std::to_string(tasks.size() + 1), T, Criticality::LO, c, c});
        }
        return TaskSet(std::move(tasks), cfg.m);
    }
    throw GenerationError("gave up after " + std::to_string(kGenerationAttempts) + " attempts");
}

}  // namespace mcsched
