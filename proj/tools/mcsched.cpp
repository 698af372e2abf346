#include "mcsched/dualrate.hpp"
#include "mcsched/harness.hpp"
#include "mcsched/io.hpp"
#include "mcsched/multirate.hpp"
#include "mcsched/simulator.hpp"
#include "mcsched/soma.hpp"
#include "mcsched/taskgen.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace mcsched;

namespace {

constexpr int kOk = 0;
constexpr int kRejected = 1;
constexpr int kBadInput = 2;

Rat parse_rat(const std::string& flag, const std::string& s) {
    try {
        return Rat::parse(s);
    } catch (const std::invalid_argument&) {
        throw InputError(flag + ": not a decimal: " + s);
    }
}

/// "0.5:1.0:0.05" (inclusive range) or "0.5,0.6,0.7".
std::vector<Rat> parse_grid(const std::string& flag, const std::string& s) {
    std::vector<Rat> out;
    if (s.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw InputError(flag + ": expected lo:hi:step");
        const Rat lo = parse_rat(flag, parts[0]), hi = parse_rat(flag, parts[1]), step = parse_rat(flag, parts[2]);
        if (!step.is_positive() || hi < lo) throw InputError(flag + ": empty range");
        for (Rat v = lo; v <= hi; v += step) out.push_back(v);
    } else {
        std::stringstream ss(s);
        for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_rat(flag, p));
    }
    if (out.empty()) throw InputError(flag + ": empty grid");
    return out;
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") std::cout << text;
    else write_file(out, text);
}

std::string describe_scenario(const ScenarioSpec& sc) {
    switch (sc.switch_kind) {
        case SwitchKind::None: return "no switch";
        case SwitchKind::JobTriggered: return "switch by " + job_name(sc.trigger_task, sc.trigger_job);
        case SwitchKind::Explicit: return "switch at " + sc.switch_at.to_string();
    }
    return "";
}

struct GenerateArgs {
    int m = 2;
    std::string ub = "0.8", umax = "1", ull;
    double ph = 0.5;
    std::optional<int> nh_min, nh_max;
    uint64_t seed = 0;
    std::string out;
};

int run_generate(const GenerateArgs& g) {
    GeneratorConfig cfg;
    cfg.m = g.m;
    cfg.target_bound = parse_rat("--ub", g.ub);
    cfg.u_max = parse_rat("--umax", g.umax);
    cfg.hi_fraction = g.ph;
    cfg.n_hi_min = g.nh_min;
    cfg.n_hi_max = g.nh_max;
    if (!g.ull.empty()) cfg.lo_of_lo = parse_rat("--ull", g.ull);
    cfg.seed = g.seed;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    try {
        emit(g.out, format_task_set(generate(cfg)));
    } catch (const GenerationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRejected;
    }
    return kOk;
}

int run_analyze(const std::string& ts_path, const std::string& a_path, const std::string& test) {
    const TaskSet ts = parse_task_set(read_file(ts_path));
    const std::string text = read_file(a_path);
    if (test == "dual") {
        const auto v = dual_rate_test(ts, parse_dual_rate(text));
        std::cout << (v ? "schedulable" : "not schedulable: " + describe(v)) << "\n";
        return v ? kOk : kRejected;
    }
    const auto a = parse_assignment(ts, text);
    const auto v = multi_rate_test(ts, a);
    std::cout << (v ? "schedulable" : "not schedulable: " + describe(v)) << "\n";
    if (v)
        for (const auto& [id, k] : completion_windows(ts, a)) std::cout << id << " completes in window " << k << "\n";
    return v ? kOk : kRejected;
}

struct AssignArgs {
    std::string taskset, algo = "soma", out;
    SomaOptions soma;
};

int run_assign(const AssignArgs& args) {
    const TaskSet ts = parse_task_set(read_file(args.taskset));
    if (args.algo == "dualrate") {
        const auto d = dual_rate_assign(ts);
        if (!d) {
            std::cerr << "no dual-rate assignment exists\n";
            return kRejected;
        }
        emit(args.out, format_dual_rate(*d));
        return kOk;
    }
    const auto res = soma(ts, args.soma);
    if (!res.success) {
        std::cerr << "no multi-rate assignment found (HI-task LO-rate sum " << res.diagnostics.objective
                  << ", " << res.diagnostics.iterations << " evaluations)\n";
        return kRejected;
    }
    emit(args.out, format_multi_rate(*res.assignment));
    std::cerr << "HI-task LO-rate sum " << res.diagnostics.objective << ", " << res.diagnostics.iterations
              << " evaluations" << (res.diagnostics.seed_used ? ", dual-rate seed" : "") << "\n";
    return kOk;
}

struct SimulateArgs {
    std::string taskset, assignment, scenario, trace;
    size_t random = 10;
    uint64_t seed = 0;
};

int run_simulate(const SimulateArgs& args) {
    const TaskSet ts = parse_task_set(read_file(args.taskset));
    const auto a = parse_assignment(ts, read_file(args.assignment));
    try {
        check_covers(ts, a);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }

    if (!args.scenario.empty()) {
        const ScenarioSpec sc = parse_scenario(read_file(args.scenario));
        const auto res = simulate(ts, a, sc);
        if (!args.trace.empty()) {
            std::ostringstream os;
            write_trace(os, res.trace);
            emit(args.trace, os.str());
        }
        if (res.verdict) {
            std::cout << "all deadlines met\n";
            return kOk;
        }
        std::cout << "deadline miss: " << res.verdict.job << " at " << res.verdict.deadline.to_string() << "\n";
        return kRejected;
    }

    if (!args.trace.empty()) throw InputError("--trace needs --scenario");
    int misses = 0;
    const auto scenarios = adversarial_scenarios(ts, a, args.random, args.seed);
    for (const auto& sc : scenarios) {
        const auto res = simulate(ts, a, sc, {.record_slices = false});
        if (!res.verdict) {
            ++misses;
            std::cout << describe_scenario(sc) << ": deadline miss: " << res.verdict.job << " at "
                      << res.verdict.deadline.to_string() << "\n";
        }
    }
    std::cout << scenarios.size() - misses << "/" << scenarios.size() << " scenarios met all deadlines\n";
    return misses == 0 ? kOk : kRejected;
}

struct ExperimentArgs {
    std::vector<int> m{2};
    std::string ub, ub_grid, sweep = "U_B", values, umax = "1", ull, out, format = "csv";
    std::optional<double> ph;
    std::optional<int> nh_min, nh_max;
    int trials = 1000, threads = 0;
    uint64_t seed = 0;
    std::vector<std::string> algos{"soma", "dualrate"};
    SomaOptions soma{.early_accept = true};
};

std::string render(const std::vector<ResultRow>& rows, const std::string& format) {
    std::ostringstream os;
    if (format == "svg") write_svg(os, rows);
    else write_csv(os, rows);
    return os.str();
}

int run_experiment_cmd(const ExperimentArgs& args) {
    ExperimentConfig cfg;
    cfg.m_values = args.m;
    cfg.trials = args.trials;
    cfg.seed = args.seed;
    cfg.threads = args.threads;
    cfg.soma = args.soma;
    cfg.u_max = parse_rat("--umax", args.umax);
    if (args.ph) cfg.hi_fraction = *args.ph;
    cfg.n_hi_min = args.nh_min;
    cfg.n_hi_max = args.nh_max;
    if (!args.ull.empty()) cfg.lo_of_lo = parse_rat("--ull", args.ull);
    cfg.algorithms.clear();
    for (const auto& a : args.algos) cfg.algorithms.push_back(parse_algorithm(a));
    try {
        cfg.sweep = parse_sweep_param(args.sweep);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    if (cfg.sweep == SweepParam::TargetBound) {
        if (!args.ub_grid.empty()) cfg.values = parse_grid("--ub-grid", args.ub_grid);
        else if (!args.ub.empty()) cfg.values = {parse_rat("--ub", args.ub)};
    } else {
        if (args.values.empty()) throw InputError("--values is required when sweeping " + args.sweep);
        cfg.values = parse_grid("--values", args.values);
        if (!args.ub.empty()) cfg.target_bound = parse_rat("--ub", args.ub);
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }

    const auto res = run_sweep(cfg);
    emit(args.out, render(res.rows, args.format));

    for (int m : cfg.m_values)
        for (Algorithm a : cfg.algorithms) {
            std::vector<ResultRow> sel;
            for (const auto& r : res.rows)
                if (r.m == m && r.algorithm == a) sel.push_back(r);
            try {
                std::cerr << "m=" << m << " " << to_string(a)
                          << " weighted acceptance ratio " << weighted_acceptance_ratio(sel).to_double() << "\n";
            } catch (const std::invalid_argument&) {
            }
        }
    for (const auto& c : res.comparisons) {
        std::cerr << "m=" << c.m << " " << res.rows[0].param_name << "=" << c.param_value.to_string()
                  << ": soma accepts " << c.rescued << " of " << c.dual_rejected << " dual-rate rejected sets";
        if (auto r = c.conditional_ratio()) std::cerr << " (" << *r << ")";
        std::cerr << "\n";
    }
    for (const auto& r : res.rows)
        if (r.generation_failures > 0 && r.algorithm == cfg.algorithms.front())
            std::cerr << "warning: m=" << r.m << " " << r.param_name << "=" << r.param_value.to_string() << ": "
                      << r.generation_failures << " generation failures\n";
    return kOk;
}

int run_report(const std::string& in, const std::string& out, const std::string& format) {
    std::ifstream is(in);
    if (!is) throw InputError("cannot open " + in);
    std::vector<ResultRow> rows;
    try {
        rows = read_csv(is);
    } catch (const std::invalid_argument& e) {
        throw InputError(in + ": " + e.what());
    }
    if (rows.empty()) throw InputError(in + ": no rows");
    emit(out, render(rows, format));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-rate fluid scheduling of dual-criticality task systems"};
    app.require_subcommand(1);
    const auto formats = CLI::IsMember({"csv", "svg"});

    GenerateArgs gen;
    auto* generate_cmd = app.add_subcommand("generate", "Draw a random task set");
    generate_cmd->add_option("--m", gen.m, "Processor count")->check(CLI::PositiveNumber);
    generate_cmd->add_option("--ub", gen.ub, "Normalized utilization bound");
    generate_cmd->add_option("--ph", gen.ph, "Expected share of HI-tasks");
    generate_cmd->add_option("--umax", gen.umax, "Per-task utilization cap");
    generate_cmd->add_option("--nh-min", gen.nh_min, "Minimum HI-task count");
    generate_cmd->add_option("--nh-max", gen.nh_max, "Maximum HI-task count");
    generate_cmd->add_option("--ull", gen.ull, "Pin normalized LO-task utilization");
    generate_cmd->add_option("--seed", gen.seed);
    generate_cmd->add_option("--out", gen.out, "Output file (default stdout)");

    std::string an_ts, an_a, an_test = "multi";
    auto* analyze_cmd = app.add_subcommand("analyze", "Test an assignment");
    analyze_cmd->add_option("--taskset", an_ts)->required();
    analyze_cmd->add_option("--assignment", an_a)->required();
    analyze_cmd->add_option("--test", an_test)->check(CLI::IsMember({"dual", "multi"}));

    AssignArgs asg;
    auto* assign_cmd = app.add_subcommand("assign", "Compute an assignment");
    assign_cmd->add_option("--taskset", asg.taskset)->required();
    assign_cmd->add_option("--algo", asg.algo)->check(CLI::IsMember({"soma", "dualrate"}));
    assign_cmd->add_option("--max-iters", asg.soma.max_iters, "Maximum coordinate sweeps")
        ->check(CLI::NonNegativeNumber);
    assign_cmd->add_option("--tol", asg.soma.tol, "Relative improvement threshold")->check(CLI::NonNegativeNumber);
    assign_cmd->add_flag("--seed-only", asg.soma.seed_only, "Evaluate only the dual-rate seed");
    assign_cmd->add_option("--out", asg.out, "Output file (default stdout)");

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run the schedule for a scenario");
    simulate_cmd->add_option("--taskset", sim.taskset)->required();
    simulate_cmd->add_option("--assignment", sim.assignment, "Multi-rate or dual-rate assignment")->required();
    simulate_cmd->add_option("--scenario", sim.scenario, "Scenario file (default: adversarial scenarios)");
    simulate_cmd->add_option("--trace", sim.trace, "Write the slice trace here");
    simulate_cmd->add_option("--random", sim.random, "Random adversarial scenarios");
    simulate_cmd->add_option("--seed", sim.seed);

    ExperimentArgs ex;
    auto* experiment_cmd = app.add_subcommand("experiment", "Acceptance-ratio sweep");
    experiment_cmd->add_option("--m", ex.m, "Processor counts")->delimiter(',');
    experiment_cmd->add_option("--ub", ex.ub, "Single U_B point, or fixed U_B for other sweeps");
    experiment_cmd->add_option("--ub-grid", ex.ub_grid, "lo:hi:step or comma list");
    experiment_cmd->add_option("--sweep", ex.sweep, "U_B, P_H, n_H, u_max or U_LL");
    experiment_cmd->add_option("--values", ex.values, "Grid for a non-U_B sweep");
    experiment_cmd->add_option("--trials", ex.trials)->check(CLI::PositiveNumber);
    experiment_cmd->add_option("--seed", ex.seed);
    experiment_cmd->add_option("--ph", ex.ph);
    experiment_cmd->add_option("--umax", ex.umax);
    experiment_cmd->add_option("--nh-min", ex.nh_min);
    experiment_cmd->add_option("--nh-max", ex.nh_max);
    experiment_cmd->add_option("--ull", ex.ull);
    experiment_cmd->add_option("--algo", ex.algos)->delimiter(',')->check(CLI::IsMember({"soma", "dualrate"}));
    experiment_cmd->add_option("--max-iters", ex.soma.max_iters)->check(CLI::NonNegativeNumber);
    experiment_cmd->add_option("--tol", ex.soma.tol)->check(CLI::NonNegativeNumber);
    experiment_cmd->add_flag("--seed-only", ex.soma.seed_only);
    experiment_cmd->add_option("--threads", ex.threads)->check(CLI::NonNegativeNumber);
    experiment_cmd->add_option("--out", ex.out, "Output file (default stdout)");
    experiment_cmd->add_option("--format", ex.format)->check(formats);

    std::string rep_in, rep_out, rep_format = "svg";
    auto* report_cmd = app.add_subcommand("report", "Render experiment rows");
    report_cmd->add_option("--in", rep_in, "CSV from experiment")->required();
    report_cmd->add_option("--out", rep_out, "Output file (default stdout)");
    report_cmd->add_option("--format", rep_format)->check(formats);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kBadInput;
    }

    try {
        if (*generate_cmd) return run_generate(gen);
        if (*analyze_cmd) return run_analyze(an_ts, an_a, an_test);
        if (*assign_cmd) return run_assign(asg);
        if (*simulate_cmd) return run_simulate(sim);
        if (*experiment_cmd) return run_experiment_cmd(ex);
        if (*report_cmd) return run_report(rep_in, rep_out, rep_format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadInput;
    }
    return kOk;
}
