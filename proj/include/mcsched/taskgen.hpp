#pragma once

#include "mcsched/rng.hpp"
#include "mcsched/task.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace mcsched {

/// Thrown when no task set satisfying the configuration was found within the
/// attempt budget.
class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Utilizations are rounded to this many decimals; periods to two.
inline constexpr int kUtilizationDigits = 6;

struct GeneratorConfig {
    int m = 2;
    Rat u_min = Rat(1, 1000);
    Rat u_max = Rat(1);
    Rat target_bound = Rat(3, 4);  // max(U_H^H, U_H^L + U_L^L) / m
    double hi_fraction = 0.5;      // expected share of HI-tasks
    // Count bounds; unset means [m+1, 10m] for all tasks, [m+1, 3m] for HI.
    std::optional<int> n_min, n_max, n_hi_min, n_hi_max;
    Rat period_min = Rat(5);
    Rat period_max = Rat(100);
    // Pins U_L^L / m instead of sampling it from the grid.
    std::optional<Rat> lo_of_lo;
    uint64_t seed = 0;

    int tasks_min() const { return n_min.value_or(m + 1); }
    int tasks_max() const { return n_max.value_or(10 * m); }
    int hi_min() const { return n_hi_min.value_or(m + 1); }
    int hi_max() const { return n_hi_max.value_or(3 * m); }

    /// Throws std::invalid_argument on an invalid configuration.
    void validate() const;
};

inline constexpr int kGenerationAttempts = 10000;

/// `count` values in [lo, hi] summing exactly to `total`, uniform over that
/// slice of the cube before rounding to `digits` decimals. Rounding error is
/// pushed into the trailing elements within bounds. Throws
/// std::invalid_argument when count*lo <= total <= count*hi fails.
std::vector<Rat> rand_fixed_sum(size_t count, const Rat& total, const Rat& lo, const Rat& hi, Rng& rng,
                                int digits = kUtilizationDigits);

/// Normalized utilization triple (each divided by m).
struct UtilizationTarget {
    Rat hi_of_hi;  // U_H^H
    Rat lo_of_hi;  // U_H^L
    Rat lo_of_lo;  // U_L^L
};

/// Every triple on the 0.05 grid with max(U_H^H, U_H^L + U_L^L) equal to
/// `bound`, with U_H^H >= 0.10, 0.05 <= U_H^L <= U_H^H and
/// 0.05 <= U_L^L <= 1 - U_H^L. When `bound` is off the grid, the term that
/// attains it takes the off-grid value.
std::vector<UtilizationTarget> utilization_targets(const Rat& bound, const std::optional<Rat>& lo_of_lo = {});

/// Draws a task set. HI-tasks come first, ids t1..tn. Throws GenerationError
/// after kGenerationAttempts rejected draws.
TaskSet generate(const GeneratorConfig& cfg);

}  // namespace mcsched
