#pragma once

#include <vector>

namespace mcsched {

/// Dense two-phase simplex for  max c^T x  s.t.  A x <= b, x >= 0.
/// Entries of b may be negative. Intended for the small feasibility problems
/// built by the multi-rate solver (a few hundred columns at most).
class LinearProgram {
public:
    enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

    LinearProgram(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                  const std::vector<double>& c);

    Status solve(std::vector<double>& x, double& objective);

private:
    void pivot(int r, int s);
    bool simplex(int phase);

    int m_, n_;
    std::vector<int> basis_, nonbasis_;
    std::vector<std::vector<double>> d_;
    int pivots_left_;
};

}  // namespace mcsched
