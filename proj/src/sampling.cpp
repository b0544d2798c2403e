#include "qbo/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "qbo/errors.hpp"
#include "qbo/tolerances.hpp"

namespace qbo {

SimplexPoint dirichlet_sample(CounterRng& rng, std::size_t m) {
    return SimplexPoint::load(rng.dirichlet(m));
}

SimplexPoint random_face_point(CounterRng& rng, std::size_t m) {
    if (m < 2) throw ValidationError("face sampling needs m >= 2");
    // Support size in {1, ..., m-1}, then a uniform support of that size.
    const std::size_t support = 1 + rng.uniform_index(m - 1);
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const std::size_t j = i + rng.uniform_index(m - i);
        std::swap(idx[i], idx[j]);
    }
    const std::vector<double> inner = rng.dirichlet(support);
    std::vector<double> coords(m, 0.0);
    for (std::size_t s = 0; s < support; ++s) coords[idx[s]] = inner[s];
    return SimplexPoint::load(coords);
}

SimplexPoint near_face_point(CounterRng& rng, std::size_t m) {
    const SimplexPoint face = random_face_point(rng, m);
    const double eps = rng.uniform_range(1e-8, 1e-4);
    std::vector<double> coords(m);
    const double uniform = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < m; ++k)
        coords[k] = (1.0 - eps) * face[k] + eps * uniform;
    return SimplexPoint::load(coords);
}

std::vector<std::size_t> random_permutation(CounterRng& rng, std::size_t m) {
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const std::size_t j = i + rng.uniform_index(m - i);
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

DoublyStochasticMatrix random_doubly_stochastic(CounterRng& rng, std::size_t m,
                                                std::size_t terms) {
    if (m == 0) throw ValidationError("doubly stochastic sampling needs m >= 1");
    if (terms == 0) terms = m + 2;
    const std::vector<double> weights = rng.dirichlet(terms);
    std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
    for (std::size_t t = 0; t < terms; ++t) {
        const std::vector<std::size_t> perm = random_permutation(rng, m);
        for (std::size_t k = 0; k < m; ++k) a[k][perm[k]] += weights[t];
    }
    return DoublyStochasticMatrix::load(a);
}

std::vector<OperatorSpec> all_permutation_operators(std::size_t m) {
    if (m == 0) throw ValidationError("permutation enumeration needs m >= 1");
    if (m > defaults::kMaxEnumerationDim)
        throw ValidationError("permutation enumeration capped at m = " +
                              std::to_string(defaults::kMaxEnumerationDim));
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<OperatorSpec> ops;
    do {
        ops.push_back(OperatorSpec::permutation(PermutationOperator::load(perm)));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return ops;
}

std::vector<SimplexPoint> trial_starts(CounterRng& rng, std::size_t m, std::size_t count) {
    if (count == 0) count = 1;
    std::vector<SimplexPoint> starts;
    starts.reserve(count);
    starts.push_back(SimplexPoint::barycenter(m));
    for (std::size_t i = 0; i < m && starts.size() < count; ++i)
        starts.push_back(SimplexPoint::vertex(m, i));
    bool interior = true;
    while (starts.size() < count) {
        if (interior || m < 2)
            starts.push_back(dirichlet_sample(rng, m));
        else
            starts.push_back(near_face_point(rng, m));
        interior = !interior;
    }
    return starts;
}

} // namespace qbo
