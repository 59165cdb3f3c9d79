#include "faircompose/linprog.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace faircompose {

void LinearProgram::add_row(std::vector<double> row, double bound) {
    if (row.size() != vars) throw std::invalid_argument("lp row size mismatch");
    if (bound < 0.0) throw std::invalid_argument("lp rhs must be nonnegative");
    rows.push_back(std::move(row));
    rhs.push_back(bound);
}

namespace {
constexpr double kPivotEps = 1e-11;
}

LpSolution solve_lp(const LinearProgram& lp, std::size_t max_iterations) {
    const std::size_t n = lp.vars;
    const std::size_t m = lp.rows.size();
    const std::size_t width = n + m + 1;

    // Tableau rows: m constraint rows then the objective row (negated costs).
    std::vector<double> t((m + 1) * width, 0.0);
    auto at = [&](std::size_t r, std::size_t c) -> double& { return t[r * width + c]; };
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) at(r, c) = lp.rows[r][c];
        at(r, n + r) = 1.0;
        at(r, width - 1) = lp.rhs[r];
    }
    for (std::size_t c = 0; c < n; ++c) at(m, c) = -lp.objective[c];

    std::vector<std::size_t> basis(m);
    for (std::size_t r = 0; r < m; ++r) basis[r] = n + r;

    LpSolution result;
    const std::size_t bland_after = max_iterations / 2;
    for (std::size_t iter = 0;; ++iter) {
        if (iter >= max_iterations) {
            result.status = LpSolution::Status::iteration_limit;
            break;
        }
        // Entering column: most negative reduced cost (Dantzig), switching to
        // Bland's rule late to guarantee termination.
        std::size_t pivot_col = width;
        if (iter < bland_after) {
            double best = -kPivotEps;
            for (std::size_t c = 0; c < n + m; ++c) {
                if (at(m, c) < best) {
                    best = at(m, c);
                    pivot_col = c;
                }
            }
        } else {
            for (std::size_t c = 0; c < n + m; ++c) {
                if (at(m, c) < -kPivotEps) {
                    pivot_col = c;
                    break;
                }
            }
        }
        if (pivot_col == width) break;  // optimal

        // Ratio test.
        std::size_t pivot_row = m + 1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < m; ++r) {
            const double a = at(r, pivot_col);
            if (a <= kPivotEps) continue;
            const double ratio = at(r, width - 1) / a;
            if (ratio < best_ratio - 1e-12 ||
                (ratio < best_ratio + 1e-12 && (pivot_row > m || basis[r] < basis[pivot_row]))) {
                best_ratio = ratio;
                pivot_row = r;
            }
        }
        if (pivot_row > m) {
            result.status = LpSolution::Status::unbounded;
            break;
        }

        // Pivot.
        const double pivot = at(pivot_row, pivot_col);
        for (std::size_t c = 0; c < width; ++c) at(pivot_row, c) /= pivot;
        for (std::size_t r = 0; r <= m; ++r) {
            if (r == pivot_row) continue;
            const double factor = at(r, pivot_col);
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c < width; ++c) at(r, c) -= factor * at(pivot_row, c);
        }
        basis[pivot_row] = pivot_col;
    }

    result.x.assign(n, 0.0);
    for (std::size_t r = 0; r < m; ++r)
        if (basis[r] < n) result.x[basis[r]] = at(r, width - 1);
    result.objective = 0.0;
    for (std::size_t c = 0; c < n; ++c) result.objective += lp.objective[c] * result.x[c];
    return result;
}

}  // namespace faircompose
