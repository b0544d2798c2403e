#pragma once

#include <cstddef>
#include <vector>

#include "qbo/operators.hpp"
#include "qbo/rng.hpp"
#include "qbo/simplex.hpp"

namespace qbo {

// Uniform sample from the simplex interior (flat Dirichlet).
SimplexPoint dirichlet_sample(CounterRng& rng, std::size_t m);

// Uniform sample on a uniformly chosen nonempty proper face (m >= 2);
// coordinates outside the face support are exactly zero.
SimplexPoint random_face_point(CounterRng& rng, std::size_t m);

// Face point nudged toward the barycenter so every coordinate is small but
// positive; stresses prefix sums near their tight region.
SimplexPoint near_face_point(CounterRng& rng, std::size_t m);

std::vector<std::size_t> random_permutation(CounterRng& rng, std::size_t m);

// Convex mix of `terms` random permutation matrices with Dirichlet weights
// (terms = 0 picks m + 2). Always passes doubly stochastic validation.
DoublyStochasticMatrix random_doubly_stochastic(CounterRng& rng, std::size_t m,
                                                std::size_t terms = 0);

// All m! coordinate permutation operators, lexicographic order. Guarded by
// the enumeration cap. m = 3 gives 6 operators.
std::vector<OperatorSpec> all_permutation_operators(std::size_t m);

// Deterministic stress starts: barycenter, then every vertex, then
// alternating interior and near-face samples until `count` points exist.
std::vector<SimplexPoint> trial_starts(CounterRng& rng, std::size_t m, std::size_t count);

} // namespace qbo
