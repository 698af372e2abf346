#pragma once

#include "mcsched/dualrate.hpp"
#include "mcsched/task.hpp"

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcsched {

/// Multi-rate fluid assignment: one LO-mode rate per task, n_H transition
/// windows after a mode switch with a per-window rate for each HI-task, and a
/// stable HI-mode rate used once the transition period is over.
struct MultiRateAssignment {
    std::map<std::string, Rat> theta_lo;
    std::vector<Rat> windows;  // durations w_1..w_{n_H}
    std::map<std::string, std::vector<Rat>> theta_trans;
    std::map<std::string, Rat> theta_hi;

    /// Rate of HI-task `id` in window j (1-based); j = n_H + 1 is the stable rate.
    const Rat& rate(const std::string& id, size_t j) const;
    /// Sum of the first `count` windows.
    Rat window_prefix(size_t count) const;
};

/// Throws AssignmentError unless `a` covers `ts` with rates in range.
void check_covers(const TaskSet& ts, const MultiRateAssignment& a);

/// Thrown when T - C^L/theta^L <= 0; the LO rate is too small for a carry-over
/// job to have any HI-mode time left.
class NonpositiveRemainingTime : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Time from a self-triggered mode switch to the carry-over job's deadline:
/// T - C^L/theta^L.
Rat hi_mode_remaining(const MCTask& task, const Rat& theta_lo);

/// Earliest completion window (1-based, in [1, n_H + 1]):
/// the unique k with  sum_{j<k} w_j < T - C^L/theta^L  and, when k <= n_H,
/// sum_{j<=k} w_j >= T - C^L/theta^L.
size_t earliest_completion_window(const MCTask& task, const Rat& theta_lo, std::span<const Rat> windows);

/// Carry-over job condition for HI-task `task` with earliest completion window k:
/// budget after the switch covers C^H - C^L, and theta^L does not exceed any
/// rate from window k on (including the stable rate).
bool carry_over_test(const MCTask& task, const MultiRateAssignment& a, size_t k);

/// Transition and stable job condition: the windows before k deliver at least
/// u^H on average and are non-decreasing, and every rate from window k on
/// (including the stable rate) is at least u^H.
bool transition_and_stable_test(const MCTask& task, const MultiRateAssignment& a, size_t k);

enum class MultiCondition {
    LoTaskRate,    // theta^L >= u^L for every task
    LoPlatform,    // sum theta^L <= m
    HiPlatform,    // per-window and stable HI rate sums <= m
    CarryOver,     // carry-over jobs
    Transition,    // transition and stable jobs
};

std::string to_string(MultiCondition c);

struct MultiVerdict {
    bool schedulable = true;
    MultiCondition failed{};
    std::string task_id;

    explicit operator bool() const { return schedulable; }
};

std::string describe(const MultiVerdict& v);

struct MultiRateTestOptions {
    /// Disable to evaluate every constraint except the LO platform bound.
    bool lo_platform = true;
};

/// Sufficient multi-rate test. Earliest completion windows are always
/// recomputed from the assignment. When T - C^L/theta^L is exactly zero
/// (theta^L = u^L) the carry-over job has no HI-mode time and k = 1 is used,
/// which reduces the carry-over budget condition to C^H = C^L.
MultiVerdict multi_rate_test(const TaskSet& ts, const MultiRateAssignment& a,
                             const MultiRateTestOptions& opt = {});

/// Completion windows as used by multi_rate_test, keyed by HI-task id.
std::map<std::string, size_t> completion_windows(const TaskSet& ts, const MultiRateAssignment& a);

/// Dual-rate embedding: zero-length windows, every transition rate equal to
/// the HI-mode rate.
MultiRateAssignment embed_dual_rate(const TaskSet& ts, const DualRateAssignment& d);

}  // namespace mcsched
