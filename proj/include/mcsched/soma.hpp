#pragma once

#include "mcsched/multirate.hpp"
#include "mcsched/task.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mcsched {

inline constexpr int kSomaEvaluationCap = 1000;

struct SomaOptions {
    /// Maximum coordinate sweeps. The search also stops after a fixed budget
    /// of feasibility evaluations (kSomaEvaluationCap).
    int max_iters = 200;
    /// Stop sweeping once a sweep improves the objective by less than this
    /// fraction.
    double tol = 1e-7;
    /// Evaluate only the dual-rate seeded candidate.
    bool seed_only = false;
    /// Return the first candidate that also fits the LO platform bound
    /// instead of minimizing further. Does not change the verdict.
    bool early_accept = false;
};

struct SomaDiagnostics {
    double objective = 0.0;  // sum of theta^L over HI-tasks
    int iterations = 0;      // feasibility evaluations spent
    bool seed_used = false;  // the returned candidate is the embedded dual-rate seed
};

/// HI-task indices (into ts.tasks()) in ascending T - C^L/u^H, stable.
std::vector<size_t> sort_hi_tasks(const TaskSet& ts);

/// Minimizes the HI-task LO-rate sum over multi-rate assignments, ignoring the
/// LO platform bound. LO-tasks get theta^L = u^L. Every returned assignment
/// passes multi_rate_test with the LO platform check disabled. The embedded
/// dual-rate seed is always a candidate, so this succeeds whenever a
/// dual-rate assignment exists. `ordering` breaks ties between HI-tasks with
/// equal remaining HI-mode time when laying out windows.
std::optional<MultiRateAssignment> solve_assignment(const TaskSet& ts, const std::vector<size_t>& ordering,
                                                    const SomaOptions& opt = {}, SomaDiagnostics* diag = nullptr);

struct SomaOutcome {
    bool success = false;
    std::optional<MultiRateAssignment> assignment;  // present iff success
    SomaDiagnostics diagnostics;
};

/// solve_assignment followed by the LO platform check.
SomaOutcome soma(const TaskSet& ts, const SomaOptions& opt = {});

}  // namespace mcsched
