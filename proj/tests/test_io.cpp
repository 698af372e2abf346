#include "doctest.h"
#include "fixtures.hpp"

#include "mcsched/io.hpp"

#include <sstream>

using namespace mcsched;
using fixtures::R;

TEST_CASE("[io] task set from the documented format") {
    const auto ts = parse_task_set(R"({"m": 2, "tasks": [
        {"id": "t1", "T": "7", "chi": "HI", "CL": "2.8", "CH": "4.9"},
        {"id": "t4", "T": "35", "chi": "LO", "CL": "15.75", "CH": "15.75"}]})");
    CHECK(ts.processors() == 2);
    REQUIRE(ts.size() == 2);
    CHECK(ts.tasks()[0].wcet_hi == R("4.9"));
    CHECK(ts.tasks()[1].chi == Criticality::LO);

    const auto lo_only = parse_task_set(R"({"m": 1, "tasks": [{"id": "a", "T": "10", "chi": "LO", "CL": "2"}]})");
    CHECK(lo_only.tasks()[0].wcet_hi == Rat(2));
}

TEST_CASE("[io] task set round trip is exact") {
    const auto ts = fixtures::worked_example();
    const auto back = parse_task_set(format_task_set(ts));
    REQUIRE(back.size() == ts.size());
    for (size_t i = 0; i < ts.size(); ++i) {
        CHECK(back.tasks()[i].id == ts.tasks()[i].id);
        CHECK(back.tasks()[i].period == ts.tasks()[i].period);
        CHECK(back.tasks()[i].wcet_lo == ts.tasks()[i].wcet_lo);
        CHECK(back.tasks()[i].wcet_hi == ts.tasks()[i].wcet_hi);
        CHECK(back.tasks()[i].chi == ts.tasks()[i].chi);
    }
    CHECK(format_task_set(back) == format_task_set(ts));
}

TEST_CASE("[io] task set rejections") {
    auto bad = [](const char* s) { CHECK_THROWS_AS(parse_task_set(s), InputError); };
    bad("not json");
    bad(R"({"m": 2, "tasks": [{"id": "a", "T": 7, "chi": "HI", "CL": "1", "CH": "2"}]})");     // number
    bad(R"({"m": 2, "tasks": [{"id": "a", "T": "7", "chi": "HI", "CL": "1", "CH": "2", "x": "1"}]})");
    bad(R"({"m": 2, "tasks": [], "extra": 1})");
    bad(R"({"m": "2", "tasks": []})");
    bad(R"({"m": 2, "tasks": [{"id": "a", "T": "7", "chi": "MID", "CL": "1", "CH": "2"}]})");
    bad(R"({"m": 2, "tasks": [{"id": "a", "T": "7", "chi": "HI", "CL": "1"}]})");
    bad(R"({"m": 2, "tasks": [{"id": "a", "T": "7", "chi": "HI", "CL": "3", "CH": "2"}]})");  // C^L > C^H
    bad(R"({"m": 2, "tasks": [{"id": "a", "T": "7", "chi": "HI", "CL": "1e-3", "CH": "2"}]})");
    bad(R"({"m": 0, "tasks": []})");
}

TEST_CASE("[io] assignments round trip") {
    const auto d = fixtures::worked_dual_rate();
    const auto d2 = parse_dual_rate(format_dual_rate(d));
    CHECK(d2.theta_lo == d.theta_lo);
    CHECK(d2.theta_hi == d.theta_hi);

    const auto a = fixtures::worked_multi_rate();
    const auto a2 = parse_multi_rate(format_multi_rate(a));
    CHECK(a2.theta_lo == a.theta_lo);
    CHECK(a2.windows == a.windows);
    CHECK(a2.theta_trans == a.theta_trans);
    CHECK(a2.theta_hi == a.theta_hi);
    CHECK(a2.theta_lo.at("t1") == R("4/7"));

    const auto parsed = parse_multi_rate(R"({"thetaL": {"t1": "0.5"}, "windows": ["2.1"],
        "thetaTrans": {"t1": ["1.0"]}, "thetaH": {"t1": "0.7"}})");
    CHECK(parsed.windows[0] == R("2.1"));
    CHECK_THROWS_AS(parse_multi_rate(R"({"thetaL": {}, "windows": [2.1], "thetaTrans": {}, "thetaH": {}})"),
                    InputError);
    CHECK_THROWS_AS(parse_dual_rate(R"({"thetaL": {}, "thetaH": {}, "k": {}})"), InputError);
    CHECK_THROWS_AS(parse_dual_rate(R"({"thetaL": {"t1": 0.5}, "thetaH": {}})"), InputError);
}

TEST_CASE("[io] scenario round trip and defaults") {
    ScenarioSpec sc;
    sc.horizon = Rat(80);
    sc.releases["t1"] = {Rat(0), Rat(7)};
    sc.releases["t2"] = {R("0.5")};
    sc.demands["t2"][0] = Rat(4);
    sc.switch_kind = SwitchKind::JobTriggered;
    sc.trigger_task = "t2";
    const auto back = parse_scenario(format_scenario(sc));
    CHECK(back.horizon == sc.horizon);
    CHECK(back.releases == sc.releases);
    CHECK(back.demands == sc.demands);
    CHECK(back.switch_kind == SwitchKind::JobTriggered);
    CHECK(back.trigger_task == "t2");
    CHECK(back.trigger_job == 0);

    const auto minimal = parse_scenario(R"({"releases": {"t1": ["0"]}})");
    CHECK(minimal.switch_kind == SwitchKind::None);
    CHECK_FALSE(minimal.horizon);

    const auto expl = parse_scenario(R"({"releases": {}, "switch": {"kind": "explicit", "at": "2.5"}})");
    CHECK(expl.switch_at == R("2.5"));

    CHECK_THROWS_AS(parse_scenario(R"({"releases": {}, "switch": {"kind": "sometimes"}})"), InputError);
    CHECK_THROWS_AS(parse_scenario(R"({"releases": {}, "demands": {"t1": {"x": "1"}}})"), InputError);
    CHECK_THROWS_AS(parse_scenario(R"({"releases": {}, "switch": {"kind": "job", "task": "t1", "job": "0"}})"),
                    InputError);
    CHECK_THROWS_AS(parse_scenario(R"({"horizon": "5"})"), InputError);
}

TEST_CASE("[io] trace format") {
    ScheduleTrace tr;
    tr.cores = 2;
    tr.switch_at = R("2.5");
    tr.slices = {{1, "t1", Rat(0), R("0.8")}, {2, "t2", Rat(0), R("4/7")}};
    std::ostringstream os;
    write_trace(os, tr);
    CHECK(os.str() == "# switch 2.5\ncore,task,start,end\n1,t1,0,0.8\n2,t2,0,4/7\n");
    tr.switch_at.reset();
    tr.slices.clear();
    std::ostringstream none;
    write_trace(none, tr);
    CHECK(none.str() == "# switch none\ncore,task,start,end\n");
}

TEST_CASE("[io] assignment reader accepts both formats") {
    const auto ts = fixtures::worked_example();
    const auto embedded = parse_assignment(ts, format_dual_rate(fixtures::worked_dual_rate()));
    CHECK(embedded.windows.size() == ts.hi_count());
    CHECK(embedded.windows[0] == Rat(0));
    CHECK(embedded.theta_trans.at("t2").back() == embedded.theta_hi.at("t2"));

    const auto multi = parse_assignment(ts, format_multi_rate(fixtures::worked_multi_rate()));
    CHECK(multi.windows == fixtures::worked_multi_rate().windows);

    CHECK_THROWS_AS(parse_assignment(ts, R"({"thetaL": {"t1": "0.7"}, "thetaH": {"t1": "0.7"}})"), InputError);
}
