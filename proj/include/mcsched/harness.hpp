#pragma once

#include "mcsched/soma.hpp"
#include "mcsched/taskgen.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mcsched {

enum class Algorithm { Soma, DualRate };

std::string to_string(Algorithm a);
/// "soma" or "dualrate"; throws std::invalid_argument otherwise.
Algorithm parse_algorithm(const std::string& s);

/// The generator parameter varied along the sweep axis.
enum class SweepParam {
    TargetBound,  // "U_B"
    HiFraction,   // "P_H"
    HiCount,      // "n_H", pins both HI-count bounds
    MaxUtil,      // "u_max"
    LoOfLo,       // "U_LL", normalized LO-task utilization
};

std::string to_string(SweepParam p);
SweepParam parse_sweep_param(const std::string& s);

/// 0.50, 0.55, ..., 1.00.
std::vector<Rat> default_bound_grid();

struct ExperimentConfig {
    std::vector<int> m_values{2};
    SweepParam sweep = SweepParam::TargetBound;
    std::vector<Rat> values = default_bound_grid();
    int trials = 1000;
    std::vector<Algorithm> algorithms{Algorithm::Soma, Algorithm::DualRate};
    uint64_t seed = 0;

    // Generator settings held fixed along the sweep.
    Rat target_bound = Rat(4, 5);
    double hi_fraction = 0.5;
    std::optional<int> n_hi_min, n_hi_max;
    Rat u_max = Rat(1);
    std::optional<Rat> lo_of_lo;

    SomaOptions soma{.early_accept = true};
    /// Worker threads; 0 means one per hardware thread.
    int threads = 0;

    /// Throws std::invalid_argument on an invalid configuration.
    void validate() const;
    /// Generator configuration for one grid point, without the seed.
    GeneratorConfig generator(int m, const Rat& value) const;
};

struct ResultRow {
    int m = 0;
    std::string param_name;
    Rat param_value;
    Algorithm algorithm{};
    int accepted = 0;
    int total = 0;               // generated sets; excludes generation failures
    int generation_failures = 0;

    double ratio() const { return total == 0 ? 0.0 : static_cast<double>(accepted) / total; }
};

/// Joint verdicts at one grid point, for the SOMA-over-dual-rate report.
struct PointComparison {
    int m = 0;
    Rat param_value;
    int total = 0;
    int dual_rejected = 0;
    int rescued = 0;  // accepted by SOMA, rejected by dual-rate

    /// rescued / dual_rejected; nullopt when dual-rate rejected nothing.
    std::optional<double> conditional_ratio() const;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;  // grouped by m, then value, then algorithm
    std::vector<PointComparison> comparisons;  // empty unless both algorithms ran
};

/// Per-trial task-set seed. Both algorithms see the set drawn from it.
uint64_t trial_seed(uint64_t master, int m, size_t point, int trial);

ExperimentResult run_sweep(const ExperimentConfig& cfg);
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

/// sum(ratio * value) / sum(value), exact. Rows must share m and algorithm.
/// Throws std::invalid_argument on empty or mixed input, or zero weight.
Rat weighted_acceptance_ratio(const std::vector<ResultRow>& rows);

inline constexpr const char* kCsvHeader = "m,param_name,param_value,algorithm,accepted,total,ratio";

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
/// Inverse of write_csv. Throws std::invalid_argument on malformed input.
std::vector<ResultRow> read_csv(std::istream& is);
/// Acceptance ratio against the swept value, one polyline per (algorithm, m).
/// Throws std::invalid_argument on empty input.
void write_svg(std::ostream& os, const std::vector<ResultRow>& rows);

}  // namespace mcsched
