#pragma once

#include "mcsched/dualrate.hpp"
#include "mcsched/multirate.hpp"
#include "mcsched/simulator.hpp"
#include "mcsched/task.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace mcsched {

/// Malformed or inconsistent input file.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// JSON text formats. Every rational is a string ("0.7", "4/7"); JSON numbers
// are accepted only for counts (processor count, job index). Unknown keys are
// rejected. Readers throw InputError; task-set invariant violations surface
// as InputError too.

TaskSet parse_task_set(const std::string& text);
std::string format_task_set(const TaskSet& ts);

DualRateAssignment parse_dual_rate(const std::string& text);
std::string format_dual_rate(const DualRateAssignment& a);

MultiRateAssignment parse_multi_rate(const std::string& text);
std::string format_multi_rate(const MultiRateAssignment& a);

/// Either format; a dual-rate file (no "windows" key) is embedded for `ts`.
MultiRateAssignment parse_assignment(const TaskSet& ts, const std::string& text);

/// {"horizon": "...", "releases": {"t1": ["0", "7"]},
///  "demands": {"t1": {"0": "4.9"}},
///  "switch": {"kind": "none" | "job" | "explicit", "task": "t1", "job": 0, "at": "2.5"}}
/// Only "releases" is required.
ScenarioSpec parse_scenario(const std::string& text);
std::string format_scenario(const ScenarioSpec& sc);

/// Header "# switch <instant|none>", then "core,task,start,end" per slice.
void write_trace(std::ostream& os, const ScheduleTrace& trace);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace mcsched
