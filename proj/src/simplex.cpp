#include "qbo/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "qbo/errors.hpp"
#include "qbo/linear_feasibility.hpp"

namespace qbo {

namespace {

std::vector<double> sanitize(std::vector<double> c, double sum_tol, const char* what) {
    if (c.empty()) throw ValidationError(std::string(what) + ": dimension must be at least 1");
    double sum = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!std::isfinite(c[i]))
            throw ValidationError(std::string(what) + ": non-finite coordinate at index " + std::to_string(i));
        if (c[i] < 0.0) {
            if (c[i] < -defaults::kCoordinateClamp)
                throw ValidationError(std::string(what) + ": negative coordinate " + std::to_string(c[i]) +
                                      " at index " + std::to_string(i));
            c[i] = 0.0;
        }
        sum += c[i];
    }
    if (std::abs(sum - 1.0) > sum_tol)
        throw ValidationError(std::string(what) + ": coordinate sum " + std::to_string(sum) +
                              " deviates from 1 beyond tolerance");
    for (auto& v : c) v /= sum;
    // Push the residual into the largest coordinate so the stored sum is 1.
    double after = std::accumulate(c.begin(), c.end(), 0.0);
    auto it = std::max_element(c.begin(), c.end());
    *it += 1.0 - after;
    return c;
}

} // namespace

SimplexPoint SimplexPoint::load(std::vector<double> coords) {
    return SimplexPoint(sanitize(std::move(coords), defaults::kLoadSumTolerance, "SimplexPoint"));
}

SimplexPoint SimplexPoint::from_operator_output(std::vector<double> coords) {
    return SimplexPoint(sanitize(std::move(coords), defaults::kApplySumTolerance, "operator output"));
}

SimplexPoint SimplexPoint::barycenter(std::size_t m) {
    if (m == 0) throw ValidationError("barycenter: dimension must be at least 1");
    return SimplexPoint(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

SimplexPoint SimplexPoint::vertex(std::size_t m, std::size_t i) {
    if (m == 0) throw ValidationError("vertex: dimension must be at least 1");
    if (i >= m) throw ValidationError("vertex: index out of range");
    std::vector<double> c(m, 0.0);
    c[i] = 1.0;
    return SimplexPoint(std::move(c));
}

SimplexPoint barycenter(std::size_t m) { return SimplexPoint::barycenter(m); }

double l1_distance(const SimplexPoint& x, const SimplexPoint& y) {
    if (x.dim() != y.dim())
        throw DimensionMismatch("l1_distance: dimensions " + std::to_string(x.dim()) + " vs " +
                                std::to_string(y.dim()));
    double d = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i) d += std::abs(x[i] - y[i]);
    return d;
}

SortedPoint sort_descending(const SimplexPoint& x) {
    const std::size_t m = x.dim();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
    SortedPoint out;
    out.values.resize(m);
    out.source_permutation.resize(m);
    for (std::size_t pos = 0; pos < m; ++pos) {
        out.values[pos] = x[order[pos]];
        out.source_permutation[order[pos]] = pos;
    }
    return out;
}

std::vector<double> descending_prefix_sums(const SimplexPoint& x) {
    SortedPoint s = sort_descending(x);
    std::vector<double> prefix(s.values.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        acc += s.values[k];
        prefix[k] = acc;
    }
    return prefix;
}

bool majorizes(const SimplexPoint& y, const SimplexPoint& x, double slack) {
    if (x.dim() != y.dim())
        throw DimensionMismatch("majorizes: dimensions " + std::to_string(y.dim()) + " vs " +
                                std::to_string(x.dim()));
    const std::vector<double> px = descending_prefix_sums(x);
    const std::vector<double> py = descending_prefix_sums(y);
    // Both points sum to 1, so only k = 1..m-1 can discriminate.
    for (std::size_t k = 0; k + 1 < px.size(); ++k)
        if (px[k] > py[k] + slack) return false;
    return true;
}

std::vector<std::vector<double>> distinct_permutation_vectors(const SimplexPoint& y, std::size_t max_dim) {
    const std::size_t m = y.dim();
    if (m > max_dim)
        throw BudgetError("permutation enumeration: dimension " + std::to_string(m) +
                          " exceeds cap " + std::to_string(max_dim));
    std::vector<double> v = y.coords();
    std::sort(v.begin(), v.end());
    std::vector<std::vector<double>> out;
    do {
        out.push_back(v);
    } while (std::next_permutation(v.begin(), v.end()));
    return out;
}

bool in_permutation_polytope(const SimplexPoint& x, const SimplexPoint& y,
                             double feasibility_tol, std::size_t max_dim) {
    if (x.dim() != y.dim())
        throw DimensionMismatch("in_permutation_polytope: dimensions " + std::to_string(x.dim()) +
                                " vs " + std::to_string(y.dim()));
    const std::size_t m = x.dim();
    const auto vertices = distinct_permutation_vectors(y, max_dim);
    const std::size_t s = vertices.size();

    // x = sum(lambda_j * v_j), sum(lambda) = 1, lambda >= 0.
    FeasibilitySystem sys;
    sys.rows = m + 1;
    sys.cols = s;
    sys.a.assign(sys.rows * sys.cols, 0.0);
    sys.b.resize(sys.rows);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j < s; ++j) sys.a[r * s + j] = vertices[j][r];
        sys.b[r] = x[r];
    }
    for (std::size_t j = 0; j < s; ++j) sys.a[m * s + j] = 1.0;
    sys.b[m] = 1.0;
    return solve_equality_feasibility(sys, feasibility_tol).feasible;
}

} // namespace qbo
