#pragma once

#include "mcsched/multirate.hpp"
#include "mcsched/task.hpp"

#include <string>
#include <vector>

namespace fixtures {

using mcsched::Criticality;
using mcsched::MCTask;
using mcsched::Rat;

inline Rat R(const char* s) { return Rat::parse(s); }

inline MCTask hi(const char* id, const char* T, const char* cl, const char* ch) {
    return {id, R(T), Criticality::HI, R(cl), R(ch)};
}

inline MCTask lo(const char* id, const char* T, const char* c) { return {id, R(T), Criticality::LO, R(c), R(c)}; }

// Three HI-tasks and one LO-task on two processors: not dual-rate schedulable,
// schedulable with three transition windows.
inline mcsched::TaskSet worked_example() {
    return mcsched::TaskSet({hi("t1", "7", "2.8", "4.9"), hi("t2", "5", "1.5", "4"), hi("t3", "35", "3.5", "10.5"),
                             lo("t4", "35", "15.75")},
                            2);
}

// Rates and windows as printed. The printed t3 LO rate 0.186766 leaves
// 16.259973 time units after a self-triggered switch, which is short of the
// 16.26 the three windows need, so this assignment fails the carry-over test.
inline mcsched::MultiRateAssignment printed_multi_rate() {
    mcsched::MultiRateAssignment a;
    a.theta_lo = {{"t1", R("4/7")}, {"t2", R("0.6")}, {"t3", R("0.186766")}, {"t4", R("0.45")}};
    a.windows = {R("2.1"), R("0.4"), R("13.76")};
    a.theta_trans = {{"t1", {R("1.0"), R("0.7"), R("0.7")}},
                     {"t2", {R("1"), R("1"), R("0.8")}},
                     {"t3", {R("0"), R("0.3"), R("0.5")}}};
    a.theta_hi = {{"t1", R("0.7")}, {"t2", R("0.8")}, {"t3", R("0.3")}};
    return a;
}

// Same with t3's LO rate read as 0.186866, the value the printed column total
// 1.808294 implies (0.571428 + 0.6 + 0.186866 + 0.45).
inline mcsched::MultiRateAssignment worked_multi_rate() {
    auto a = printed_multi_rate();
    a.theta_lo["t3"] = R("0.186866");
    return a;
}

inline mcsched::DualRateAssignment worked_dual_rate() {
    mcsched::DualRateAssignment d;
    d.theta_lo = {{"t1", R("0.700")}, {"t2", R("0.641")}, {"t3", R("0.224")}, {"t4", R("0.450")}};
    d.theta_hi = {{"t1", R("0.700")}, {"t2", R("0.939")}, {"t3", R("0.360")}};
    return d;
}

}  // namespace fixtures
