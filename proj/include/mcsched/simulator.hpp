#pragma once

#include "mcsched/multirate.hpp"
#include "mcsched/task.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcsched {

class ScenarioError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class SwitchKind { None, JobTriggered, Explicit };

/// Scripted releases, execution demands and mode-switch policy.
///
/// Jobs are named "<task>#<index>" with 0-based indices into the task's
/// release list. Demands not listed default to the worst case consistent with
/// the switch: C^H for a HI job that has not provably reached C^L by the
/// switch (release + C^L/theta^L >= switch instant), C^L otherwise.
struct ScenarioSpec {
    std::optional<Rat> horizon;  // unset: see default_horizon
    std::map<std::string, std::vector<Rat>> releases;
    std::map<std::string, std::map<size_t, Rat>> demands;
    SwitchKind switch_kind = SwitchKind::None;
    std::string trigger_task;  // JobTriggered: the job that overruns
    size_t trigger_job = 0;
    Rat switch_at;             // Explicit
};

std::string job_name(const std::string& task, size_t index);

/// Every task released at 0 and then every period until `until` (exclusive).
std::map<std::string, std::vector<Rat>> synchronous_releases(const TaskSet& ts, const Rat& until);

enum class PartitionMode { LO, Transition, HI };

struct Allocation {
    std::string task;
    Rat amount;
};

/// Interval between consecutive scheduling events with the time each task's
/// current job is entitled to in it.
struct Partition {
    Rat start, end;
    PartitionMode mode = PartitionMode::LO;
    // Transition windows containing start and end (1-based), transition only.
    size_t first_window = 0, last_window = 0;
    std::vector<Allocation> allocations;  // task order, tasks with an active job

    Rat length() const { return end - start; }
};

struct PartitionOptions {
    /// Split partitions at every transition-window boundary. When off, only
    /// the end of the transition period is a boundary and allocations follow
    /// the piecewise-rate integral across windows.
    bool window_boundaries = true;
};

/// Switch instant implied by the scenario, after validating it against the
/// task set and LO rates. Throws ScenarioError.
std::optional<Rat> switch_instant(const TaskSet& ts, const MultiRateAssignment& a, const ScenarioSpec& sc);

/// Latest of the scenario horizon and (switch + transition period + 2 max T),
/// with the switch at 0 when there is none.
Rat default_horizon(const TaskSet& ts, const MultiRateAssignment& a, const ScenarioSpec& sc);

/// Time task `id` is entitled to in [x1, x2] after the switch (both measured
/// from the switch), integrating the transition rates and then theta^H.
Rat hi_mode_allocation(const MultiRateAssignment& a, const std::string& id, const Rat& x1, const Rat& x2);

/// Deadline-partitioned allocation plan. Allocations are budgets for each
/// task's current job; the simulator trims them to the job's remaining demand.
std::vector<Partition> build_partitions(const TaskSet& ts, const MultiRateAssignment& a, const ScenarioSpec& sc,
                                        const PartitionOptions& opt = {});

struct Slice {
    int core;  // 1-based
    std::string task;
    Rat start, end;
};

/// Wrap-around packing of a partition's allocations onto m cores. Throws
/// std::invalid_argument if an allocation is negative or longer than the
/// partition, or the total exceeds m times its length.
std::vector<Slice> mcnaughton_pack(const Partition& p, int m);

struct JobRecord {
    std::string job, task;
    Rat release, deadline, demand;
    std::optional<Rat> completion;
    bool dropped = false;  // LO job discarded at the switch
};

struct ScheduleTrace {
    int cores = 0;
    std::optional<Rat> switch_at;
    std::vector<Slice> slices;
    std::vector<JobRecord> jobs;
};

struct SimVerdict {
    bool all_met = true;
    std::string job;  // first job to miss
    Rat deadline;

    explicit operator bool() const { return all_met; }
};

struct SimulationResult {
    ScheduleTrace trace;
    SimVerdict verdict;
};

struct SimulateOptions {
    PartitionOptions partitions;
    bool record_slices = true;
};

/// Runs the partitions in order and stops at the first deadline miss.
SimulationResult simulate(const TaskSet& ts, const MultiRateAssignment& a, const ScenarioSpec& sc,
                          const SimulateOptions& opt = {});

/// Empty when the trace is well formed; otherwise the first problem found
/// (overlap on a core, or one task on two cores at once).
std::optional<std::string> check_trace(const ScheduleTrace& trace);

/// Switch scenarios aimed at the assignment's weak points: one per HI-task
/// in which its first job triggers the switch, one per distinct nonzero
/// window boundary (explicit switch at that instant after a synchronous
/// release), `random_count` with random sporadic releases and switch
/// instants, and one without a switch.
std::vector<ScenarioSpec> adversarial_scenarios(const TaskSet& ts, const MultiRateAssignment& a,
                                                size_t random_count = 10, uint64_t seed = 0);

}  // namespace mcsched
