#pragma once

// Test-only transportation oracle: a dense two-phase tableau simplex with
// Bland's rule on the full LP "min c.x, A x = b, x >= 0". Deliberately shares
// nothing with the library's augmenting-path solver.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace etm::testing {

class DenseSimplex {
public:
    /// Minimizes cost.x subject to rows of `a` times x == rhs, x >= 0.
    static double minimize(const std::vector<std::vector<double>>& a, std::vector<double> rhs,
                           const std::vector<double>& cost, std::vector<double>* solution = nullptr) {
        const std::size_t rows = a.size();
        const std::size_t vars = cost.size();
        // tableau columns: vars, rows artificials, rhs
        const std::size_t width = vars + rows + 1;
        std::vector<std::vector<double>> t(rows, std::vector<double>(width, 0.0));
        std::vector<std::size_t> basis(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            const double sign = rhs[r] < 0 ? -1.0 : 1.0;
            for (std::size_t j = 0; j < vars; ++j) t[r][j] = sign * a[r][j];
            t[r][vars + r] = 1.0;
            t[r][width - 1] = sign * rhs[r];
            basis[r] = vars + r;
        }

        // phase one: minimize the sum of artificials
        std::vector<double> phase1(vars + rows, 0.0);
        for (std::size_t r = 0; r < rows; ++r) phase1[vars + r] = 1.0;
        run(t, basis, phase1, vars + rows);
        double infeasibility = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
            if (basis[r] >= vars) infeasibility += t[r][width - 1];
        }
        if (infeasibility > 1e-9) throw std::runtime_error("LP infeasible");

        // drive zero-level artificials out of the basis; drop redundant rows
        for (std::size_t r = 0; r < t.size();) {
            if (basis[r] < vars) {
                ++r;
                continue;
            }
            std::size_t col = vars;
            for (std::size_t j = 0; j < vars; ++j) {
                if (std::abs(t[r][j]) > 1e-12) {
                    col = j;
                    break;
                }
            }
            if (col == vars) {
                t.erase(t.begin() + static_cast<std::ptrdiff_t>(r));
                basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(r));
                continue;
            }
            pivot(t, basis, r, col);
            ++r;
        }

        std::vector<double> c(vars + rows, 0.0);
        for (std::size_t j = 0; j < vars; ++j) c[j] = cost[j];
        run(t, basis, c, vars);

        std::vector<double> x(vars, 0.0);
        for (std::size_t r = 0; r < t.size(); ++r) {
            if (basis[r] < vars) x[basis[r]] = t[r][width - 1];
        }
        double value = 0.0;
        for (std::size_t j = 0; j < vars; ++j) value += cost[j] * x[j];
        if (solution) *solution = x;
        return value;
    }

private:
    static void pivot(std::vector<std::vector<double>>& t, std::vector<std::size_t>& basis, std::size_t pr,
                      std::size_t pc) {
        const double p = t[pr][pc];
        for (double& v : t[pr]) v /= p;
        for (std::size_t r = 0; r < t.size(); ++r) {
            if (r == pr) continue;
            const double f = t[r][pc];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < t[r].size(); ++j) t[r][j] -= f * t[pr][j];
        }
        basis[pr] = pc;
    }

    /// Bland's rule over the first `allowed` columns.
    static void run(std::vector<std::vector<double>>& t, std::vector<std::size_t>& basis, const std::vector<double>& c,
                    std::size_t allowed) {
        const std::size_t width = t.empty() ? 0 : t[0].size();
        for (int guard = 0; guard < 100000; ++guard) {
            std::size_t enter = allowed;
            for (std::size_t j = 0; j < allowed; ++j) {
                double reduced = c[j];
                for (std::size_t r = 0; r < t.size(); ++r) reduced -= c[basis[r]] * t[r][j];
                if (reduced < -1e-12) {
                    enter = j;
                    break;
                }
            }
            if (enter == allowed) return;
            std::size_t leave = t.size();
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < t.size(); ++r) {
                if (t[r][enter] > 1e-12) {
                    const double ratio = t[r][width - 1] / t[r][enter];
                    if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis[r] < basis[leave])) {
                        best = ratio;
                        leave = r;
                    }
                }
            }
            if (leave == t.size()) throw std::runtime_error("LP unbounded");
            pivot(t, basis, leave, enter);
        }
        throw std::runtime_error("simplex did not terminate");
    }
};

/// Transportation cost via the dense simplex; `cost` is row-major m x n.
inline double transport_oracle(const std::vector<double>& supply, const std::vector<double>& demand,
                               const std::vector<double>& cost) {
    const std::size_t m = supply.size();
    const std::size_t n = demand.size();
    std::vector<std::vector<double>> a;
    std::vector<double> rhs;
    for (std::size_t u = 0; u < m; ++u) {
        std::vector<double> row(m * n, 0.0);
        for (std::size_t v = 0; v < n; ++v) row[u * n + v] = 1.0;
        a.push_back(row);
        rhs.push_back(supply[u]);
    }
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<double> row(m * n, 0.0);
        for (std::size_t u = 0; u < m; ++u) row[u * n + v] = 1.0;
        a.push_back(row);
        rhs.push_back(demand[v]);
    }
    return DenseSimplex::minimize(a, rhs, cost);
}

}  // namespace etm::testing
