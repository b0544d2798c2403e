#pragma once

#include <cstddef>
#include <vector>

#include "qbo/tolerances.hpp"

namespace qbo {

// A point of the standard simplex: nonnegative coordinates summing to 1.
// Instances are immutable; construction sanitizes and renormalizes, so every
// live SimplexPoint satisfies the invariants exactly.
class SimplexPoint {
public:
    // Strict entry point for external data (files, user input).
    static SimplexPoint load(std::vector<double> coords);

    // Entry point for operator outputs, which tolerate more sum drift before
    // renormalization (defaults::kApplySumTolerance) but reject worse.
    static SimplexPoint from_operator_output(std::vector<double> coords);

    static SimplexPoint barycenter(std::size_t m);
    static SimplexPoint vertex(std::size_t m, std::size_t i);

    std::size_t dim() const noexcept { return c_.size(); }
    double operator[](std::size_t i) const { return c_[i]; }
    const std::vector<double>& coords() const noexcept { return c_; }

    bool operator==(const SimplexPoint&) const = default;

private:
    explicit SimplexPoint(std::vector<double> c) : c_(std::move(c)) {}
    std::vector<double> c_;
};

// Non-increasing rearrangement of a point, with the permutation that produced
// it.  source_permutation[i] is the sorted position of original coordinate i,
// so values[source_permutation[i]] == x[i].  Ties keep original index order.
struct SortedPoint {
    std::vector<double> values;
    std::vector<std::size_t> source_permutation;
};

double l1_distance(const SimplexPoint& x, const SimplexPoint& y);

SortedPoint sort_descending(const SimplexPoint& x);

// Prefix sums of the non-increasing rearrangement (k = 1..m).
std::vector<double> descending_prefix_sums(const SimplexPoint& x);

// True iff y majorizes x: every prefix sum of x's rearrangement is bounded by
// y's, up to `slack`.
bool majorizes(const SimplexPoint& y, const SimplexPoint& x,
               double slack = defaults::kMajorizationSlack);

SimplexPoint barycenter(std::size_t m);

// Membership of x in the convex hull of all coordinate permutations of y,
// decided by linear feasibility over the (deduplicated) permutation vectors.
// Enumerates up to m! vectors; refuses dimensions above `max_dim`.
bool in_permutation_polytope(const SimplexPoint& x, const SimplexPoint& y,
                             double feasibility_tol = defaults::kFeasibilityTol,
                             std::size_t max_dim = defaults::kMaxEnumerationDim);

// The distinct coordinate permutations of y, as plain vectors.
std::vector<std::vector<double>> distinct_permutation_vectors(const SimplexPoint& y,
                                                              std::size_t max_dim = defaults::kMaxEnumerationDim);

} // namespace qbo
