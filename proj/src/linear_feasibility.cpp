#include "qbo/linear_feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qbo/errors.hpp"

namespace qbo {

namespace {
constexpr double kPivotEps = 1e-11;
}

FeasibilityOutcome solve_equality_feasibility(const FeasibilitySystem& sys, double tol) {
    const std::size_t r = sys.rows;
    const std::size_t n = sys.cols;
    if (sys.a.size() != r * n || sys.b.size() != r)
        throw ValidationError("feasibility system: shape mismatch");
    if (!sys.lower.empty() && sys.lower.size() != n)
        throw ValidationError("feasibility system: lower-bound size mismatch");

    // Shift out the lower bounds, then make the right-hand side nonnegative.
    std::vector<double> rhs = sys.b;
    if (!sys.lower.empty()) {
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < n; ++j) rhs[i] -= sys.a[i * n + j] * sys.lower[j];
    }

    const std::size_t width = n + r; // original columns plus one artificial per row
    std::vector<double> t(r * width, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        const double sign = rhs[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) t[i * width + j] = sign * sys.a[i * n + j];
        t[i * width + n + i] = 1.0;
        rhs[i] = sign * rhs[i];
    }

    std::vector<std::size_t> basis(r);
    for (std::size_t i = 0; i < r; ++i) basis[i] = n + i;

    // Reduced-cost row for min(sum of artificials): z_j = sum_i t_ij over the
    // artificial basis; artificial columns are barred from re-entering.
    std::vector<double> z(n, 0.0);
    double zval = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < n; ++j) z[j] += t[i * width + j];
        zval += rhs[i];
    }

    const std::size_t max_iter = 200 + 50 * (r + n);
    for (std::size_t iter = 0;; ++iter) {
        if (iter > max_iter)
            throw std::runtime_error("feasibility solver: iteration limit (" + std::to_string(max_iter) + ")");

        // Bland: smallest improving column that also has a usable pivot.
        std::size_t enter = width;
        std::size_t leave = r;
        for (std::size_t j = 0; j < n && enter == width; ++j) {
            if (z[j] <= kPivotEps) continue;
            double best_ratio = 0.0;
            std::size_t best_row = r;
            for (std::size_t i = 0; i < r; ++i) {
                const double aij = t[i * width + j];
                if (aij <= kPivotEps) continue;
                const double ratio = rhs[i] / aij;
                if (best_row == r || ratio < best_ratio - 1e-15 ||
                    (std::abs(ratio - best_ratio) <= 1e-15 && basis[i] < basis[best_row])) {
                    best_ratio = ratio;
                    best_row = i;
                }
            }
            if (best_row < r) {
                enter = j;
                leave = best_row;
            }
        }
        if (enter == width) break;

        const double piv = t[leave * width + enter];
        for (std::size_t j = 0; j < width; ++j) t[leave * width + j] /= piv;
        rhs[leave] /= piv;
        for (std::size_t i = 0; i < r; ++i) {
            if (i == leave) continue;
            const double f = t[i * width + enter];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < width; ++j) t[i * width + j] -= f * t[leave * width + j];
            rhs[i] -= f * rhs[leave];
            if (rhs[i] < 0.0 && rhs[i] > -1e-13) rhs[i] = 0.0;
        }
        const double zf = z[enter];
        for (std::size_t j = 0; j < n; ++j) z[j] -= zf * t[leave * width + j];
        zval -= zf * rhs[leave];
        basis[leave] = enter;
    }

    FeasibilityOutcome out;
    out.residual = std::max(zval, 0.0);
    out.feasible = out.residual <= tol;
    if (out.feasible) {
        out.solution.assign(n, 0.0);
        if (!sys.lower.empty()) out.solution = sys.lower;
        for (std::size_t i = 0; i < r; ++i)
            if (basis[i] < n) out.solution[basis[i]] += std::max(rhs[i], 0.0);
    }
    return out;
}

} // namespace qbo
