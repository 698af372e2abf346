#pragma once

#include "mcsched/task.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace mcsched {

/// Raised when an assignment does not cover its task set (missing or extra
/// ids, rates outside their domain, wrong window count).
class AssignmentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// One LO-mode rate per task and one HI-mode rate per HI-task.
struct DualRateAssignment {
    std::map<std::string, Rat> theta_lo;
    std::map<std::string, Rat> theta_hi;
};

/// Conditions of the exact dual-rate test, in evaluation order.
enum class DualCondition {
    LoTaskRate = 1,     // theta^L >= u^L
    HiTaskBudget = 2,   // u^L/theta^L + (u^H - u^L)/theta^H <= 1
    HiRateOrder = 3,    // theta^H >= theta^L
    LoPlatform = 4,     // sum theta^L <= m
    HiPlatform = 5,     // sum theta^H <= m
};

struct DualVerdict {
    bool schedulable = true;
    DualCondition failed{};  // meaningful when !schedulable
    std::string task_id;     // empty for platform conditions

    explicit operator bool() const { return schedulable; }
};

std::string to_string(DualCondition c);
std::string describe(const DualVerdict& v);

/// Throws AssignmentError if `a` does not cover `ts`.
void check_covers(const TaskSet& ts, const DualRateAssignment& a);

/// Exact test: schedulable iff all five conditions hold. Reports the first
/// violated condition (per-task conditions scan tasks in set order).
DualVerdict dual_rate_test(const TaskSet& ts, const DualRateAssignment& a);

/// Assignment minimizing the HI-task LO-mode rate sum subject to the per-task
/// conditions and the HI platform bound, ignoring the LO platform bound.
/// LO-tasks get theta^L = u^L. Returns nullopt when sum u^H > m (no HI
/// assignment exists). Rates are 9-digit decimals, rounded so that the exact
/// per-task conditions and the HI platform bound hold.
std::optional<DualRateAssignment> dual_rate_minimize(const TaskSet& ts);

/// Dual-rate optimal assigner: returns an assignment passing dual_rate_test
/// whenever one exists, nullopt otherwise.
std::optional<DualRateAssignment> dual_rate_assign(const TaskSet& ts);

/// Sum of theta^L over the HI-tasks.
Rat hi_lo_rate_sum(const TaskSet& ts, const std::map<std::string, Rat>& theta_lo);

}  // namespace mcsched
