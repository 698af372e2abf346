#include "doctest.h"
#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace mcsched;
using fixtures::R;

namespace {

TaskSet hi_part_of_worked_example() {
    const auto full = fixtures::worked_example();
    return TaskSet({full.tasks().begin(), full.tasks().begin() + 3}, 2);
}

double lo_rate_sum(const DualRateAssignment& a) {
    double s = 0;
    for (const auto& [id, r] : a.theta_lo) s += r.to_double();
    return s;
}

// Lattice DP over theta^H (step 1e-3 of a processor), theta^L at the budget
// boundary; minimal HI-task LO-rate sum subject to sum theta^H <= m.
double lattice_minimum(const TaskSet& ts) {
    const int m_units = ts.processors() * 1000;
    std::vector<double> best(m_units + 1, 0.0);
    for (const auto& t : ts.tasks()) {
        if (!t.is_hi()) continue;
        const auto u = task_utilizations(t);
        const double a = u.lo.to_double(), b = u.hi.to_double(), d = b - a;
        std::vector<double> next(m_units + 1, std::numeric_limits<double>::infinity());
        for (int x = static_cast<int>(std::ceil(b * 1000 - 1e-9)); x <= 1000; ++x) {
            const double th = x / 1000.0;
            const double tl = d == 0 ? a : a * th / (th - d);
            for (int c = x; c <= m_units; ++c) next[c] = std::min(next[c], best[c - x] + tl);
        }
        best = next;
    }
    return best[m_units];
}

}  // namespace

TEST_CASE("[dual] worked example dual-rate columns are rejected") {
    const auto v = dual_rate_test(fixtures::worked_example(), fixtures::worked_dual_rate());
    CHECK_FALSE(v.schedulable);
    // The three-decimal columns are rounded below the budget boundary
    // (0.3/0.641 + 0.5/0.939 = 1.0005), so the budget is the first violation.
    CHECK(v.failed == DualCondition::HiTaskBudget);
    CHECK(v.task_id == "t2");
    Rat s(0);
    for (const auto& [id, r] : fixtures::worked_dual_rate().theta_lo) s += r;
    CHECK(s == R("2.015"));
    CHECK(s > Rat(2));
}

TEST_CASE("[dual] single task at the budget boundary") {
    const TaskSet ts({fixtures::hi("a", "2", "1", "2")}, 1);
    DualRateAssignment d{{{"a", Rat(1)}}, {{"a", Rat(1)}}};
    CHECK(dual_rate_test(ts, d).schedulable);
    d.theta_lo["a"] = R("0.9");
    const auto v = dual_rate_test(ts, d);
    CHECK_FALSE(v.schedulable);
    CHECK(v.failed == DualCondition::HiTaskBudget);
    CHECK(v.task_id == "a");
}

TEST_CASE("[dual] failure order and task attribution") {
    const TaskSet ts({fixtures::hi("a", "10", "2", "5"), fixtures::lo("b", "10", "3")}, 1);
    DualRateAssignment d{{{"a", R("0.5")}, {"b", R("0.2")}}, {{"a", R("0.6")}}};
    auto v = dual_rate_test(ts, d);
    CHECK(v.failed == DualCondition::LoTaskRate);
    CHECK(v.task_id == "b");

    d = {{{"a", R("0.7")}, {"b", R("0.3")}}, {{"a", R("0.6")}}};
    v = dual_rate_test(ts, d);  // 0.2/0.7 + 0.3/0.6 < 1 but theta^H < theta^L
    CHECK(v.failed == DualCondition::HiRateOrder);

    d = {{{"a", R("0.5")}, {"b", R("0.6")}}, {{"a", R("0.6")}}};
    CHECK(dual_rate_test(ts, d).failed == DualCondition::LoPlatform);

    const TaskSet two({fixtures::hi("a", "10", "1", "5"), fixtures::hi("c", "10", "1", "5")}, 1);
    d = {{{"a", R("0.3")}, {"c", R("0.3")}}, {{"a", R("0.6")}, {"c", R("0.6")}}};
    CHECK(dual_rate_test(two, d).failed == DualCondition::HiPlatform);
}

TEST_CASE("[dual] coverage errors") {
    const auto ts = fixtures::worked_example();
    auto d = fixtures::worked_dual_rate();
    d.theta_hi["t4"] = R("0.5");
    CHECK_THROWS_AS(dual_rate_test(ts, d), AssignmentError);
    d = fixtures::worked_dual_rate();
    d.theta_lo.erase("t2");
    CHECK_THROWS_AS(dual_rate_test(ts, d), AssignmentError);
    d = fixtures::worked_dual_rate();
    d.theta_lo["t1"] = R("1.1");
    CHECK_THROWS_AS(dual_rate_test(ts, d), AssignmentError);
    d = fixtures::worked_dual_rate();
    d.theta_lo["zz"] = R("0.1");
    CHECK_THROWS_AS(dual_rate_test(ts, d), AssignmentError);
}

TEST_CASE("[dual] worked example is dual-rate infeasible") {
    CHECK_FALSE(dual_rate_assign(fixtures::worked_example()));
}

TEST_CASE("[dual] HI part of the worked example") {
    const auto ts = hi_part_of_worked_example();
    const auto a = dual_rate_assign(ts);
    REQUIRE(a);
    CHECK(dual_rate_test(ts, *a).schedulable);
    // Continuous optimum from an independent SLSQP solve; the printed
    // three-decimal columns (sum 1.565) round below it and break the budget for t2.
    CHECK(lo_rate_sum(*a) == doctest::Approx(1.5659075192).epsilon(1e-8));
    CHECK(a->theta_hi.at("t2").to_double() == doctest::Approx(0.93951267).epsilon(1e-6));
    CHECK(lo_rate_sum(*a) <= lattice_minimum(ts) + 1e-9);
    CHECK(lo_rate_sum(*a) >= lattice_minimum(ts) - 1e-3);
}

TEST_CASE("[dual] degenerate HI tasks keep their utilizations") {
    const TaskSet ts({fixtures::hi("a", "10", "3", "3"), fixtures::hi("b", "4", "1", "1")}, 1);
    const auto a = dual_rate_assign(ts);
    REQUIRE(a);
    CHECK(a->theta_lo.at("a") == R("0.3"));
    CHECK(a->theta_hi.at("a") == R("0.3"));
    CHECK(a->theta_lo.at("b") == R("0.25"));
    CHECK(a->theta_hi.at("b") == R("0.25"));
}

TEST_CASE("[dual] HI utilization above m has no assignment") {
    const TaskSet ts({fixtures::hi("a", "10", "3", "9"), fixtures::hi("b", "10", "1", "9")}, 1);
    CHECK_FALSE(dual_rate_minimize(ts));
    CHECK_FALSE(dual_rate_assign(ts));
}

TEST_CASE("[dual] full utilization fits exactly") {
    const TaskSet ts({fixtures::hi("a", "10", "2", "10"), fixtures::hi("b", "10", "5", "10")}, 2);
    const auto a = dual_rate_assign(ts);
    REQUIRE(a);
    CHECK(a->theta_hi.at("a") == Rat(1));
    CHECK(a->theta_lo.at("a") == Rat(1));
}

TEST_CASE("[dual] returned rates satisfy the KKT boundary property") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const int m = 1 + trial % 3;
        std::vector<MCTask> tasks;
        const int n = 2 + static_cast<int>(U(rng) * 5);
        for (int i = 0; i < n; ++i) {
            const Rat T = Rat::round_decimal(5 + 95 * U(rng), 2);
            const Rat uh = Rat::round_decimal(0.05 + 0.9 * U(rng), 3);
            const Rat ul = Rat::round_decimal(uh.to_double() * (0.05 + 0.95 * U(rng)), 3);
            const bool is_hi = U(rng) < 0.6;
            const Rat cl = max(ul, Rat(1, 1000)) * T;
            tasks.push_back({"x" + std::to_string(i), T, is_hi ? Criticality::HI : Criticality::LO, cl,
                             is_hi ? max(uh * T, cl) : cl});
        }
        const TaskSet ts(tasks, m);
        const auto a = dual_rate_minimize(ts);
        if (!a) continue;
        for (const auto& t : ts.tasks()) {
            const auto u = task_utilizations(t);
            if (!t.is_hi()) {
                CHECK(a->theta_lo.at(t.id) == u.lo);
                continue;
            }
            const Rat& th = a->theta_hi.at(t.id);
            const Rat& tl = a->theta_lo.at(t.id);
            CHECK(th >= u.hi);
            CHECK(tl >= u.lo);
            CHECK(u.lo / tl + (u.hi - u.lo) / th <= Rat(1));
            // Budget tight up to the 9-digit snapping, or theta^H at a bound
            const double slack = 1.0 - (u.lo / tl + (u.hi - u.lo) / th).to_double();
            const bool at_bound = th == Rat(1) || th == u.hi || (th - u.hi).to_double() < 1e-8;
            CHECK((slack < 1e-7 || at_bound));
            ++checked;
        }
        Rat hs(0);
        for (const auto& [id, r] : a->theta_hi) hs += r;
        CHECK(hs <= Rat(m));
    }
    CHECK(checked > 100);
}
