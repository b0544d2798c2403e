#pragma once

#include <cstddef>
#include <vector>

#include "qbo/tolerances.hpp"

namespace qbo {

// Equality-constrained feasibility: find x with A x = b and x_j >= lower_j.
// `a` is row-major rows x cols; an empty `lower` means all-zero bounds.
struct FeasibilitySystem {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> lower;
};

struct FeasibilityOutcome {
    bool feasible = false;
    double residual = 0.0;          // phase-1 optimum (sum of artificials)
    std::vector<double> solution;   // meaningful when feasible
};

// Dense phase-1 simplex with Bland's rule.  Instances here are tiny (tens of
// columns, ~10 rows); the implementation favors robustness over speed.
FeasibilityOutcome solve_equality_feasibility(const FeasibilitySystem& sys,
                                              double tol = defaults::kFeasibilityTol);

} // namespace qbo
