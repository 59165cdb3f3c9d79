#pragma once

#include <cstddef>
#include <vector>

namespace faircompose {

// Dense primal simplex for: maximize c.x subject to A.x <= b, x >= 0,
// with all b >= 0 (so the slack basis is feasible and no phase one is
// needed). Dantzig pricing with a Bland fallback against cycling.
struct LinearProgram {
    std::size_t vars = 0;
    std::vector<double> objective;          // size vars
    std::vector<std::vector<double>> rows;  // each size vars
    std::vector<double> rhs;                // one per row, must be >= 0

    void add_row(std::vector<double> row, double bound);
};

struct LpSolution {
    enum class Status { optimal, unbounded, iteration_limit };
    Status status = Status::optimal;
    std::vector<double> x;
    double objective = 0.0;
};

LpSolution solve_lp(const LinearProgram& lp, std::size_t max_iterations = 200000);

}  // namespace faircompose
