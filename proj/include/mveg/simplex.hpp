#pragma once

#include <cstddef>
#include <vector>

namespace mveg {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::optimal;
    double value = 0.0;
    std::vector<double> x;
};

// Solves  maximize c.x  subject to  A x <= b,  x >= 0.
// A is row-major with shape rows x cols. Dense two-phase tableau method with
// a lexicographic tie-break in the ratio test; intended for the small dense
// programs this library generates, not as a general-purpose solver.
LpResult solve_lp(std::size_t rows, std::size_t cols, const std::vector<double>& A,
                  const std::vector<double>& b, const std::vector<double>& c);

}  // namespace mveg
