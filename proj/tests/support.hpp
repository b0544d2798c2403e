#pragma once

// Generators shared between the unit and acceptance binaries. Test-only.

#include <cstddef>
#include <vector>

#include "qbo/operators.hpp"
#include "qbo/polytope.hpp"
#include "qbo/rng.hpp"
#include "qbo/sampling.hpp"
#include "qbo/simplex.hpp"

namespace testsupport {

// Image of y under a random doubly stochastic map; always majorized by y,
// which makes (image, y) a guaranteed-true majorization pair.
inline qbo::SimplexPoint random_ds_image(qbo::CounterRng& rng, const qbo::SimplexPoint& y) {
    const qbo::DoublyStochasticMatrix a = qbo::random_doubly_stochastic(rng, y.dim());
    return qbo::SimplexPoint::from_operator_output(a.apply_raw(y.coords()));
}

// Random symmetric stochastic coefficient tensor; not bistochastic in
// general, which is the point for falsifier tests.
inline qbo::OperatorSpec random_tensor_operator(qbo::CounterRng& rng, std::size_t m) {
    std::vector<std::vector<std::vector<double>>> p(
        m, std::vector<std::vector<double>>(m, std::vector<double>(m, 0.0)));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            const std::vector<double> row = rng.dirichlet(m);
            p[i][j] = row;
            p[j][i] = row;
        }
    return qbo::OperatorSpec::tensor(qbo::QsoTensor::load(p));
}

// Random points in [0,1]^d pruned until no generator is a convex
// combination of the others.
inline std::vector<std::vector<double>> random_irredundant_generators(qbo::CounterRng& rng,
                                                                      std::size_t d,
                                                                      std::size_t s) {
    std::vector<std::vector<double>> gens;
    for (std::size_t j = 0; j < s; ++j) {
        std::vector<double> g(d);
        for (double& v : g) v = rng.uniform01();
        gens.push_back(g);
    }
    for (;;) {
        const std::vector<bool> flags = qbo::check_irredundant(gens);
        std::size_t drop = gens.size();
        for (std::size_t j = 0; j < flags.size(); ++j)
            if (!flags[j]) {
                drop = j;
                break;
            }
        if (drop == gens.size()) return gens;
        gens.erase(gens.begin() + static_cast<std::ptrdiff_t>(drop));
    }
}

} // namespace testsupport
