#pragma once

#include "mcsched/rational.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcsched {

enum class Criticality { LO, HI };

std::string to_string(Criticality c);
Criticality parse_criticality(const std::string& s);

/// One implicit-deadline sporadic task (period = relative deadline).
struct MCTask {
    std::string id;
    Rat period;
    Criticality chi = Criticality::LO;
    Rat wcet_lo;  // C^L
    Rat wcet_hi;  // C^H

    bool is_hi() const { return chi == Criticality::HI; }
};

struct Utilization {
    Rat lo;  // u^L = C^L / T
    Rat hi;  // u^H = C^H / T
};

Utilization task_utilizations(const MCTask& task);

/// A single violated invariant, tagged with the offending task (empty for
/// set-level problems).
struct Violation {
    std::string task_id;
    std::string message;
};

class InvalidTaskSet : public std::invalid_argument {
public:
    explicit InvalidTaskSet(std::vector<Violation> v);
    const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

/// Ordered task list plus processor count. Construction validates; every
/// TaskSet instance in circulation is valid.
class TaskSet {
public:
    TaskSet() = default;
    TaskSet(std::vector<MCTask> tasks, int m);

    const std::vector<MCTask>& tasks() const { return tasks_; }
    int processors() const { return m_; }
    size_t size() const { return tasks_.size(); }
    size_t hi_count() const;

    /// Indices into tasks() of the HI-tasks, in task order.
    std::vector<size_t> hi_indices() const;
    std::vector<size_t> lo_indices() const;

    std::optional<size_t> find(const std::string& id) const;
    const MCTask& at(const std::string& id) const;

private:
    std::vector<MCTask> tasks_;
    int m_ = 1;
};

/// Returns every violated invariant; empty means valid.
std::vector<Violation> validate(const std::vector<MCTask>& tasks, int m);
inline std::vector<Violation> validate(const TaskSet& ts) { return validate(ts.tasks(), ts.processors()); }

/// Normalized system utilizations (each sum divided by m).
struct SystemUtilization {
    Rat lo_of_lo;  // U_L^L
    Rat lo_of_hi;  // U_H^L
    Rat hi_of_hi;  // U_H^H

    /// max(U_H^H, U_H^L + U_L^L)
    Rat bound() const { return max(hi_of_hi, lo_of_hi + lo_of_lo); }
};

SystemUtilization system_utilizations(const TaskSet& ts);

}  // namespace mcsched
