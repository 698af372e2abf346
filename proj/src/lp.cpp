#include "mcsched/lp.hpp"

#include <limits>
#include <utility>

namespace mcsched {

namespace {

constexpr double kEps = 1e-10;

}  // namespace

LinearProgram::LinearProgram(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                             const std::vector<double>& c)
    : m_(static_cast<int>(b.size())),
      n_(static_cast<int>(c.size())),
      basis_(m_),
      nonbasis_(n_ + 1),
      d_(m_ + 2, std::vector<double>(n_ + 2, 0.0)),
      pivots_left_(50 * (m_ + n_ + 10)) {
    for (int i = 0; i < m_; ++i)
        for (int j = 0; j < n_; ++j) d_[i][j] = A[i][j];
    for (int i = 0; i < m_; ++i) {
        basis_[i] = n_ + i;
        d_[i][n_] = -1;
        d_[i][n_ + 1] = b[i];
    }
    for (int j = 0; j < n_; ++j) {
        nonbasis_[j] = j;
        d_[m_][j] = -c[j];
    }
    nonbasis_[n_] = -1;
    d_[m_ + 1][n_] = 1;
}

void LinearProgram::pivot(int r, int s) {
    const double inv = 1.0 / d_[r][s];
    auto& row_r = d_[r];
    for (int i = 0; i < m_ + 2; ++i) {
        if (i == r) continue;
        auto& row = d_[i];
        const double f = row[s] * inv;
        if (f == 0.0) continue;
        for (int j = 0; j < n_ + 2; ++j)
            if (j != s) row[j] -= row_r[j] * f;
        row[s] = -f;
    }
    for (int j = 0; j < n_ + 2; ++j)
        if (j != s) row_r[j] *= inv;
    row_r[s] = inv;
    std::swap(basis_[r], nonbasis_[s]);
}

// Dantzig entering rule with smallest-index ties; ratio ties by smallest
// basis index.
bool LinearProgram::simplex(int phase) {
    const int x = phase == 1 ? m_ + 1 : m_;
    while (true) {
        if (--pivots_left_ < 0) return false;
        int s = -1;
        for (int j = 0; j <= n_; ++j) {
            if (phase == 2 && nonbasis_[j] == -1) continue;
            if (s == -1 || d_[x][j] < d_[x][s] || (d_[x][j] == d_[x][s] && nonbasis_[j] < nonbasis_[s])) s = j;
        }
        if (d_[x][s] > -kEps) return true;
        int r = -1;
        for (int i = 0; i < m_; ++i) {
            if (d_[i][s] < kEps) continue;
            if (r == -1) {
                r = i;
                continue;
            }
            const double a = d_[i][n_ + 1] / d_[i][s], b = d_[r][n_ + 1] / d_[r][s];
            if (a < b || (a == b && basis_[i] < basis_[r])) r = i;
        }
        if (r == -1) return false;
        pivot(r, s);
    }
}

LinearProgram::Status LinearProgram::solve(std::vector<double>& x, double& objective) {
    int r = 0;
    for (int i = 1; i < m_; ++i)
        if (d_[i][n_ + 1] < d_[r][n_ + 1]) r = i;
    if (m_ > 0 && d_[r][n_ + 1] < -kEps) {
        pivot(r, n_);
        if (!simplex(1)) return pivots_left_ < 0 ? Status::IterationLimit : Status::Infeasible;
        if (d_[m_ + 1][n_ + 1] < -1e-9) return Status::Infeasible;
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] != -1) continue;
            int s = -1;
            for (int j = 0; j <= n_; ++j)
                if (s == -1 || d_[i][j] < d_[i][s] || (d_[i][j] == d_[i][s] && nonbasis_[j] < nonbasis_[s])) s = j;
            pivot(i, s);
        }
    }
    if (!simplex(2)) return pivots_left_ < 0 ? Status::IterationLimit : Status::Unbounded;
    x.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i)
        if (basis_[i] >= 0 && basis_[i] < n_) x[basis_[i]] = d_[i][n_ + 1];
    objective = d_[m_][n_ + 1];
    return Status::Optimal;
}

}  // namespace mcsched
