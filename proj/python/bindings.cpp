#include "mcsched/dualrate.hpp"
#include "mcsched/harness.hpp"
#include "mcsched/io.hpp"
#include "mcsched/multirate.hpp"
#include "mcsched/simulator.hpp"
#include "mcsched/soma.hpp"
#include "mcsched/taskgen.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace mcsched;

// Rationals cross the boundary as decimal strings ("0.7", "4/7") so nothing
// is rounded through a float. Task sets and assignments use the JSON formats
// of the command-line tool.

namespace {

std::optional<Rat> opt_rat(const std::optional<std::string>& s) {
    if (!s) return std::nullopt;
    return Rat::parse(*s);
}

py::dict verdict_dict(bool ok, const std::string& reason) {
    py::dict d;
    d["schedulable"] = ok;
    d["reason"] = reason;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multi-rate fluid scheduling of dual-criticality task systems";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);

    py::class_<TaskSet>(m, "TaskSet")
        .def_static("from_json", &parse_task_set, py::arg("text"))
        .def("to_json", &format_task_set)
        .def_property_readonly("m", &TaskSet::processors)
        .def("__len__", &TaskSet::size)
        .def_property_readonly("hi_count", &TaskSet::hi_count)
        .def_property_readonly("tasks",
                               [](const TaskSet& ts) {
                                   py::list out;
                                   for (const auto& t : ts.tasks()) {
                                       py::dict d;
                                       d["id"] = t.id;
                                       d["T"] = t.period.to_string();
                                       d["chi"] = to_string(t.chi);
                                       d["CL"] = t.wcet_lo.to_string();
                                       d["CH"] = t.wcet_hi.to_string();
                                       out.append(d);
                                   }
                                   return out;
                               })
        .def("utilizations", [](const TaskSet& ts) {
            const auto u = system_utilizations(ts);
            py::dict d;
            d["lo_of_lo"] = u.lo_of_lo.to_string();
            d["lo_of_hi"] = u.lo_of_hi.to_string();
            d["hi_of_hi"] = u.hi_of_hi.to_string();
            d["bound"] = u.bound().to_string();
            return d;
        });

    m.def(
        "generate",
        [](int procs, const std::string& ub, double ph, uint64_t seed, const std::string& u_max,
           std::optional<int> nh_min, std::optional<int> nh_max, const std::optional<std::string>& ull) {
            GeneratorConfig cfg;
            cfg.m = procs;
            cfg.target_bound = Rat::parse(ub);
            cfg.hi_fraction = ph;
            cfg.seed = seed;
            cfg.u_max = Rat::parse(u_max);
            cfg.n_hi_min = nh_min;
            cfg.n_hi_max = nh_max;
            cfg.lo_of_lo = opt_rat(ull);
            cfg.validate();
            return generate(cfg);
        },
        py::arg("m"), py::arg("ub"), py::arg("ph") = 0.5, py::arg("seed") = 0, py::arg("u_max") = "1",
        py::arg("nh_min") = py::none(), py::arg("nh_max") = py::none(), py::arg("ull") = py::none());

    m.def(
        "dual_rate_test",
        [](const TaskSet& ts, const std::string& assignment) {
            const auto v = dual_rate_test(ts, parse_dual_rate(assignment));
            return verdict_dict(v.schedulable, v ? "" : describe(v));
        },
        py::arg("taskset"), py::arg("assignment"));

    m.def(
        "multi_rate_test",
        [](const TaskSet& ts, const std::string& assignment) {
            const auto v = multi_rate_test(ts, parse_assignment(ts, assignment));
            return verdict_dict(v.schedulable, v ? "" : describe(v));
        },
        py::arg("taskset"), py::arg("assignment"));

    m.def(
        "dual_rate_assign",
        [](const TaskSet& ts) -> std::optional<std::string> {
            const auto d = dual_rate_assign(ts);
            if (!d) return std::nullopt;
            return format_dual_rate(*d);
        },
        py::arg("taskset"));

    m.def(
        "soma",
        [](const TaskSet& ts, int max_iters, double tol, bool seed_only) -> std::optional<std::string> {
            SomaOptions opt;
            opt.max_iters = max_iters;
            opt.tol = tol;
            opt.seed_only = seed_only;
            py::gil_scoped_release release;
            const auto res = soma(ts, opt);
            if (!res.success) return std::nullopt;
            return format_multi_rate(*res.assignment);
        },
        py::arg("taskset"), py::arg("max_iters") = 200, py::arg("tol") = 1e-7, py::arg("seed_only") = false);

    m.def(
        "simulate",
        [](const TaskSet& ts, const std::string& assignment, const std::optional<std::string>& scenario) {
            const auto a = parse_assignment(ts, assignment);
            py::dict d;
            if (scenario) {
                const auto res = simulate(ts, a, parse_scenario(*scenario));
                std::ostringstream os;
                write_trace(os, res.trace);
                d["all_met"] = res.verdict.all_met;
                d["job"] = res.verdict.job;
                d["deadline"] = res.verdict.all_met ? "" : res.verdict.deadline.to_string();
                d["trace"] = os.str();
                return d;
            }
            const auto scenarios = adversarial_scenarios(ts, a);
            int met = 0;
            for (const auto& sc : scenarios) met += simulate(ts, a, sc, {.record_slices = false}).verdict.all_met;
            d["all_met"] = met == static_cast<int>(scenarios.size());
            d["scenarios"] = scenarios.size();
            d["met"] = met;
            return d;
        },
        py::arg("taskset"), py::arg("assignment"), py::arg("scenario") = py::none());

    m.def(
        "run_experiment",
        [](const std::vector<int>& ms, const std::vector<std::string>& ub_grid, int trials, uint64_t seed,
           const std::vector<std::string>& algorithms) {
            ExperimentConfig cfg;
            cfg.m_values = ms;
            cfg.values.clear();
            for (const auto& v : ub_grid) cfg.values.push_back(Rat::parse(v));
            cfg.trials = trials;
            cfg.seed = seed;
            cfg.algorithms.clear();
            for (const auto& a : algorithms) cfg.algorithms.push_back(parse_algorithm(a));
            std::ostringstream os;
            {
                py::gil_scoped_release release;
                write_csv(os, run_experiment(cfg));
            }
            return os.str();
        },
        py::arg("m"), py::arg("ub_grid"), py::arg("trials") = 1000, py::arg("seed") = 0,
        py::arg("algorithms") = std::vector<std::string>{"soma", "dualrate"},
        "Acceptance-ratio sweep; returns the CSV text.");

    m.def(
        "weighted_acceptance_ratio",
        [](const std::string& csv, int procs, const std::string& algorithm) {
            std::istringstream is(csv);
            std::vector<ResultRow> sel;
            for (const auto& r : read_csv(is))
                if (r.m == procs && to_string(r.algorithm) == algorithm) sel.push_back(r);
            return weighted_acceptance_ratio(sel).to_string();
        },
        py::arg("csv"), py::arg("m"), py::arg("algorithm"));
}
