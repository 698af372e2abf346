#include "doctest.h"

#include "mcsched/harness.hpp"

#include <set>
#include <sstream>

using namespace mcsched;

namespace {

ExperimentConfig single_point(int m, Rat ub, int trials, uint64_t seed) {
    ExperimentConfig cfg;
    cfg.m_values = {m};
    cfg.values = {ub};
    cfg.trials = trials;
    cfg.seed = seed;
    return cfg;
}

const ResultRow& row_for(const std::vector<ResultRow>& rows, Algorithm a) {
    for (const auto& r : rows)
        if (r.algorithm == a) return r;
    throw std::logic_error("missing row");
}

std::string csv_of(const std::vector<ResultRow>& rows) {
    std::ostringstream os;
    write_csv(os, rows);
    return os.str();
}

ResultRow make_row(const char* value, int accepted, int total, Algorithm a = Algorithm::Soma) {
    ResultRow r;
    r.m = 2;
    r.param_name = "U_B";
    r.param_value = Rat::parse(value);
    r.algorithm = a;
    r.accepted = accepted;
    r.total = total;
    return r;
}

}  // namespace

TEST_CASE("[harness] default grid") {
    const auto g = default_bound_grid();
    REQUIRE(g.size() == 11);
    CHECK(g.front() == Rat(1, 2));
    CHECK(g[1] == Rat::parse("0.55"));
    CHECK(g.back() == Rat(1));
}

TEST_CASE("[harness] low utilization is almost always accepted") {
    const auto rows = run_experiment(single_point(2, Rat::parse("0.60"), 200, 9));
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.total == 200);
        CHECK(r.ratio() >= 0.99);
    }
}

TEST_CASE("[harness] soma accepts every set dual-rate accepts") {
    const auto res = run_sweep(single_point(2, Rat(1), 200, 4));
    CHECK(row_for(res.rows, Algorithm::Soma).accepted >= row_for(res.rows, Algorithm::DualRate).accepted);
    REQUIRE(res.comparisons.size() == 1);
    const auto& c = res.comparisons[0];
    // Dominance makes the counts consistent: soma = dual + rescued.
    CHECK(row_for(res.rows, Algorithm::Soma).accepted ==
          row_for(res.rows, Algorithm::DualRate).accepted + c.rescued);
    CHECK(c.dual_rejected == c.total - row_for(res.rows, Algorithm::DualRate).accepted);
}

TEST_CASE("[harness] one trial gives a 0 or 1 ratio") {
    for (uint64_t seed = 0; seed < 5; ++seed)
        for (const auto& r : run_experiment(single_point(2, Rat::parse("0.9"), 1, seed)))
            CHECK((r.ratio() == 0.0 || r.ratio() == 1.0));
}

TEST_CASE("[harness] results do not depend on the thread count") {
    auto cfg = single_point(2, Rat::parse("0.95"), 40, 17);
    cfg.values = {Rat::parse("0.85"), Rat::parse("0.95")};
    cfg.threads = 1;
    const auto one = csv_of(run_experiment(cfg));
    cfg.threads = 3;
    CHECK(csv_of(run_experiment(cfg)) == one);
    CHECK(csv_of(run_experiment(cfg)) == one);
    cfg.seed = 18;
    CHECK(csv_of(run_experiment(cfg)) != one);
}

TEST_CASE("[harness] trial seeds are distinct across the sweep") {
    std::set<uint64_t> seen;
    for (int m : {2, 4})
        for (size_t p = 0; p < 11; ++p)
            for (int t = 0; t < 50; ++t) seen.insert(trial_seed(1, m, p, t));
    CHECK(seen.size() == 2 * 11 * 50);
}

TEST_CASE("[harness] sweep overrides reach the generator") {
    ExperimentConfig cfg;
    cfg.sweep = SweepParam::HiCount;
    cfg.values = {Rat(4)};
    auto g = cfg.generator(2, Rat(4));
    CHECK(g.hi_min() == 4);
    CHECK(g.hi_max() == 4);
    CHECK(g.target_bound == Rat(4, 5));
    CHECK_THROWS_AS(cfg.generator(2, Rat(7, 2)), std::invalid_argument);

    cfg.sweep = SweepParam::HiFraction;
    CHECK(cfg.generator(2, Rat::parse("0.3")).hi_fraction == doctest::Approx(0.3));
    cfg.sweep = SweepParam::MaxUtil;
    CHECK(cfg.generator(2, Rat::parse("0.6")).u_max == Rat::parse("0.6"));
    cfg.sweep = SweepParam::LoOfLo;
    CHECK(cfg.generator(2, Rat::parse("0.2")).lo_of_lo == Rat::parse("0.2"));

    CHECK(parse_sweep_param("u_max") == SweepParam::MaxUtil);
    CHECK(to_string(SweepParam::LoOfLo) == "U_LL");
    CHECK_THROWS_AS(parse_sweep_param("x"), std::invalid_argument);
}

TEST_CASE("[harness] invalid configurations") {
    auto cfg = single_point(2, Rat::parse("0.8"), 0, 1);
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.trials = 10;
    cfg.values.clear();
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.values = {Rat::parse("0.8")};
    cfg.algorithms.clear();
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("[harness] generation failures are counted, not fatal") {
    // Three HI-tasks cannot reach U_H^H = 2 with u <= 0.1.
    auto cfg = single_point(2, Rat(1), 2, 3);
    cfg.u_max = Rat(1, 10);
    cfg.n_hi_min = cfg.n_hi_max = 3;
    const auto rows = run_experiment(cfg);
    for (const auto& r : rows) {
        CHECK(r.total == 0);
        CHECK(r.generation_failures == 2);
        CHECK(r.ratio() == 0.0);
    }
}

TEST_CASE("[harness] weighted acceptance ratio") {
    std::vector<ResultRow> flat;
    for (const auto& v : default_bound_grid()) {
        ResultRow r = make_row("0", 10, 10);
        r.param_value = v;
        flat.push_back(r);
    }
    CHECK(weighted_acceptance_ratio(flat) == Rat(1));
    for (auto& r : flat) r.accepted = 5;
    CHECK(weighted_acceptance_ratio(flat) == Rat(1, 2));

    CHECK(weighted_acceptance_ratio({make_row("0.5", 10, 10), make_row("1.0", 4, 10)}) == Rat::parse("0.6"));

    CHECK_THROWS_AS(weighted_acceptance_ratio({}), std::invalid_argument);
    CHECK_THROWS_AS(weighted_acceptance_ratio({make_row("0.5", 1, 1), make_row("0.6", 1, 1, Algorithm::DualRate)}),
                    std::invalid_argument);
}

TEST_CASE("[harness] conditional ratio") {
    PointComparison c;
    CHECK_FALSE(c.conditional_ratio());
    c.dual_rejected = 8;
    c.rescued = 2;
    CHECK(*c.conditional_ratio() == doctest::Approx(0.25));
}

TEST_CASE("[harness] csv layout and round trip") {
    std::vector<ResultRow> rows;
    for (const auto& v : default_bound_grid())
        for (Algorithm a : {Algorithm::Soma, Algorithm::DualRate}) {
            ResultRow r = make_row("0", 2, 3, a);
            r.param_value = v;
            rows.push_back(r);
        }
    const std::string csv = csv_of(rows);
    std::istringstream is(csv);
    std::string line;
    int lines = 0;
    std::getline(is, line);
    CHECK(line == "m,param_name,param_value,algorithm,accepted,total,ratio");
    while (std::getline(is, line)) ++lines;
    CHECK(lines == 22);
    CHECK(csv.find("\n2,U_B,0.55,dualrate,2,3,0.666667\n") != std::string::npos);

    std::istringstream back(csv);
    const auto parsed = read_csv(back);
    CHECK(csv_of(parsed) == csv);

    std::istringstream bad("m,param_name\n");
    CHECK_THROWS_AS(read_csv(bad), std::invalid_argument);
    std::istringstream over(std::string(kCsvHeader) + "\n2,U_B,0.5,soma,4,3,1.3\n");
    CHECK_THROWS_AS(read_csv(over), std::invalid_argument);
}

TEST_CASE("[harness] svg output") {
    std::ostringstream one;
    write_svg(one, {make_row("0.8", 1, 1)});
    const std::string s = one.str();
    CHECK(s.rfind("<svg", 0) == 0);
    CHECK(s.find("</svg>") != std::string::npos);
    CHECK(s.find("<polyline") != std::string::npos);
    CHECK(s.find("acceptance ratio") != std::string::npos);
    CHECK(s.find("U_B") != std::string::npos);

    std::ostringstream two;
    write_svg(two, {make_row("0.5", 1, 1), make_row("1.0", 0, 1), make_row("0.5", 1, 1, Algorithm::DualRate),
                    make_row("1.0", 0, 1, Algorithm::DualRate)});
    size_t count = 0;
    for (size_t pos = 0; (pos = two.str().find("<polyline", pos)) != std::string::npos; ++pos) ++count;
    CHECK(count == 2);

    std::ostringstream none;
    CHECK_THROWS_AS(write_svg(none, {}), std::invalid_argument);
}
