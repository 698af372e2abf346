#include "doctest.h"
#include "fixtures.hpp"

#include <random>

using namespace mcsched;
using fixtures::R;

namespace {

const MCTask& task(const TaskSet& ts, const char* id) { return ts.at(id); }

}  // namespace

TEST_CASE("[multi] earliest completion windows of the worked example") {
    const auto ts = fixtures::worked_example();
    const auto a = fixtures::worked_multi_rate();
    CHECK(hi_mode_remaining(task(ts, "t1"), a.theta_lo.at("t1")) == R("2.1"));
    CHECK(hi_mode_remaining(task(ts, "t2"), a.theta_lo.at("t2")) == R("2.5"));
    CHECK(hi_mode_remaining(task(ts, "t3"), a.theta_lo.at("t3")) > R("16.26"));
    CHECK(hi_mode_remaining(task(ts, "t3"), a.theta_lo.at("t3")) < R("16.2701"));
    CHECK(earliest_completion_window(task(ts, "t1"), a.theta_lo.at("t1"), a.windows) == 1);
    CHECK(earliest_completion_window(task(ts, "t2"), a.theta_lo.at("t2"), a.windows) == 2);
    CHECK(earliest_completion_window(task(ts, "t3"), a.theta_lo.at("t3"), a.windows) == 4);

    const auto k = completion_windows(ts, a);
    CHECK(k.at("t1") == 1);
    CHECK(k.at("t2") == 2);
    CHECK(k.at("t3") == 4);
}

TEST_CASE("[multi] printed t3 LO rate falls into the third window") {
    const auto ts = fixtures::worked_example();
    const auto a = fixtures::printed_multi_rate();
    const Rat rem = hi_mode_remaining(task(ts, "t3"), a.theta_lo.at("t3"));
    CHECK(rem == R("35") - R("3.5") / R("0.186766"));
    CHECK(rem.to_double() == doctest::Approx(16.2599723718).epsilon(1e-10));
    CHECK(earliest_completion_window(task(ts, "t3"), a.theta_lo.at("t3"), a.windows) == 3);
    // 0.12 + 0.5 * (16.2599724 - 2.5) = 6.9999862 < 7
    CHECK_FALSE(carry_over_test(task(ts, "t3"), a, 3));
    const auto v = multi_rate_test(ts, a);
    CHECK(v.failed == MultiCondition::CarryOver);
    CHECK(v.task_id == "t3");
}

TEST_CASE("[multi] completion window agrees with a linear scan") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> wd(0, 6), cd(1, 20), td(2, 40);
    for (int trial = 0; trial < 3000; ++trial) {
        std::vector<Rat> w(1 + trial % 4);
        for (auto& x : w) x = Rat(wd(rng), 2);
        const Rat T(td(rng));
        const Rat cl = min(T, Rat(cd(rng), 4));
        const MCTask t{"x", T, Criticality::HI, cl, cl};
        const Rat theta = min(Rat(1), cl / T + Rat(cd(rng), 40));
        const Rat rem = T - cl / theta;
        if (!rem.is_positive()) {
            CHECK_THROWS_AS(earliest_completion_window(t, theta, w), NonpositiveRemainingTime);
            continue;
        }
        size_t expect = 0, count = 0;
        for (size_t k = 1; k <= w.size() + 1; ++k) {
            Rat before(0);
            for (size_t j = 0; j + 1 < k; ++j) before += w[j];
            const bool ok = before < rem && (k == w.size() + 1 || before + w[k - 1] >= rem);
            if (ok) {
                expect = k;
                ++count;
            }
        }
        CHECK(count == 1);
        CHECK(earliest_completion_window(t, theta, w) == expect);
    }
}

TEST_CASE("[multi] carry-over inequalities of the worked example") {
    const auto ts = fixtures::worked_example();
    const auto a = fixtures::worked_multi_rate();
    CHECK(Rat(1) * R("2.1") >= R("4.9") - R("2.8"));
    CHECK(Rat(1) * R("2.1") + Rat(1) * R("0.4") >= R("4") - R("1.5"));
    CHECK(R("0") * R("2.1") + R("0.3") * R("0.4") + R("0.5") * R("13.76") >= R("10.5") - R("3.5"));
    CHECK(carry_over_test(task(ts, "t1"), a, 1));
    CHECK(carry_over_test(task(ts, "t2"), a, 2));
    CHECK(carry_over_test(task(ts, "t3"), a, 4));
}

TEST_CASE("[multi] transition and stable jobs of the worked example") {
    const auto ts = fixtures::worked_example();
    const auto a = fixtures::worked_multi_rate();
    CHECK(transition_and_stable_test(task(ts, "t1"), a, 1));
    CHECK(transition_and_stable_test(task(ts, "t2"), a, 2));
    CHECK(transition_and_stable_test(task(ts, "t3"), a, 4));
    // 0*2.1 + 0.3*0.4 = 0.12 < 0.3 * 2.5
    CHECK_FALSE(transition_and_stable_test(task(ts, "t3"), a, 3));
}

TEST_CASE("[multi] worked example passes the sufficient test") {
    const auto ts = fixtures::worked_example();
    const auto a = fixtures::worked_multi_rate();
    const auto v = multi_rate_test(ts, a);
    CHECK(v.schedulable);

    Rat lo(0);
    for (const auto& [id, r] : a.theta_lo) lo += r;
    CHECK(lo.to_double() == doctest::Approx(1.808294).epsilon(1e-6));
    CHECK(lo - Rat(4, 7) + R("0.571428") == R("1.808294"));
    for (size_t j = 1; j <= 3; ++j) {
        Rat s(0);
        for (const char* id : {"t1", "t2", "t3"}) s += a.rate(id, j);
        CHECK(s == Rat(2));
    }
    CHECK(a.theta_hi.at("t1") + a.theta_hi.at("t2") + a.theta_hi.at("t3") == R("1.8"));
}

TEST_CASE("[multi] failure conditions in order") {
    const auto ts = fixtures::worked_example();
    auto a = fixtures::worked_multi_rate();
    a.theta_lo["t4"] = R("0.44");
    auto v = multi_rate_test(ts, a);
    CHECK(v.failed == MultiCondition::LoTaskRate);
    CHECK(v.task_id == "t4");

    a = fixtures::worked_multi_rate();
    a.theta_lo["t4"] = R("0.7");
    CHECK(multi_rate_test(ts, a).failed == MultiCondition::LoPlatform);
    CHECK(multi_rate_test(ts, a, {.lo_platform = false}).schedulable);

    a = fixtures::worked_multi_rate();
    a.theta_trans["t3"][1] = R("0.31");
    CHECK(multi_rate_test(ts, a).failed == MultiCondition::HiPlatform);

    a = fixtures::worked_multi_rate();
    a.theta_trans["t3"][2] = R("0.4");
    v = multi_rate_test(ts, a);
    CHECK(v.failed == MultiCondition::CarryOver);
    CHECK(v.task_id == "t3");

    a = fixtures::worked_multi_rate();
    a.theta_trans["t2"][2] = R("0.79");
    a.theta_hi["t2"] = R("0.8");
    v = multi_rate_test(ts, a);
    CHECK(v.failed == MultiCondition::Transition);
    CHECK(v.task_id == "t2");
}

TEST_CASE("[multi] empty task set") {
    const TaskSet ts({}, 2);
    CHECK(multi_rate_test(ts, MultiRateAssignment{}).schedulable);
}

TEST_CASE("[multi] coverage errors") {
    const auto ts = fixtures::worked_example();
    auto a = fixtures::worked_multi_rate();
    a.windows.pop_back();
    CHECK_THROWS_AS(multi_rate_test(ts, a), AssignmentError);
    a = fixtures::worked_multi_rate();
    a.theta_trans["t1"].push_back(Rat(1));
    CHECK_THROWS_AS(multi_rate_test(ts, a), AssignmentError);
    a = fixtures::worked_multi_rate();
    a.windows[0] = R("-1");
    CHECK_THROWS_AS(multi_rate_test(ts, a), AssignmentError);
    a = fixtures::worked_multi_rate();
    a.theta_hi["t4"] = R("0.45");
    CHECK_THROWS_AS(multi_rate_test(ts, a), AssignmentError);
}

TEST_CASE("[multi] embedding the dual-rate columns fails the LO platform bound") {
    const auto ts = fixtures::worked_example();
    const auto e = embed_dual_rate(ts, fixtures::worked_dual_rate());
    CHECK(e.windows == std::vector<Rat>(3, Rat(0)));
    CHECK(e.theta_trans.at("t2") == std::vector<Rat>(3, R("0.939")));
    const auto v = multi_rate_test(ts, e);
    CHECK(v.failed == MultiCondition::LoPlatform);
    CHECK_FALSE(dual_rate_test(ts, fixtures::worked_dual_rate()).schedulable);
}

TEST_CASE("[multi] budget violation maps to the carry-over condition") {
    const TaskSet ts({fixtures::hi("a", "2", "1", "2")}, 1);
    const DualRateAssignment d{{{"a", R("0.9")}}, {{"a", Rat(1)}}};
    CHECK(dual_rate_test(ts, d).failed == DualCondition::HiTaskBudget);
    const auto v = multi_rate_test(ts, embed_dual_rate(ts, d));
    CHECK(v.failed == MultiCondition::CarryOver);
    CHECK(v.task_id == "a");
}

TEST_CASE("[multi] LO rate equal to utilization leaves no HI-mode time") {
    const TaskSet ts({fixtures::hi("a", "10", "2", "5"), fixtures::hi("b", "10", "3", "3")}, 1);
    MultiRateAssignment a;
    a.theta_lo = {{"a", R("0.2")}, {"b", R("0.3")}};
    a.windows = {Rat(0), Rat(0)};
    a.theta_trans = {{"a", {R("0.5"), R("0.5")}}, {"b", {R("0.3"), R("0.3")}}};
    a.theta_hi = {{"a", R("0.5")}, {"b", R("0.3")}};
    CHECK_THROWS_AS(earliest_completion_window(ts.at("a"), R("0.2"), a.windows), NonpositiveRemainingTime);
    const auto v = multi_rate_test(ts, a);
    CHECK(v.failed == MultiCondition::CarryOver);
    CHECK(v.task_id == "a");
    // b has C^L = C^H, so no HI-mode budget is needed
    CHECK(completion_windows(ts, a).at("b") == 1);
    CHECK(carry_over_test(ts.at("b"), a, 1));
}

TEST_CASE("[multi] raising a rate never breaks per-task conditions") {
    const auto ts = fixtures::worked_example();
    const auto base = fixtures::worked_multi_rate();
    for (const char* id : {"t1", "t2", "t3"}) {
        for (size_t j = 0; j < 3; ++j) {
            auto a = base;
            auto& row = a.theta_trans[id];
            // stay non-decreasing before k by lifting the tail too
            for (size_t l = j; l < row.size(); ++l) row[l] = min(Rat(1), row[l] + R("0.05"));
            a.theta_hi[id] = min(Rat(1), a.theta_hi[id] + R("0.05"));
            const auto k = completion_windows(ts, a).at(id);
            CHECK(carry_over_test(ts.at(id), a, k));
            CHECK(transition_and_stable_test(ts.at(id), a, k));
        }
    }
}
