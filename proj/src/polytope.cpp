#include "qbo/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "qbo/bistochastic.hpp"
#include "qbo/errors.hpp"
#include "qbo/linear_feasibility.hpp"
#include "qbo/rng.hpp"

namespace qbo {

namespace {

void validate_generators(const std::vector<std::vector<double>>& gens) {
    if (gens.empty()) throw ValidationError("polytope: no generators");
    const std::size_t d = gens.front().size();
    if (d == 0) throw ValidationError("polytope: zero-dimensional generator");
    for (const auto& g : gens) {
        if (g.size() != d) throw DimensionMismatch("polytope: mixed generator dimensions");
        for (double v : g)
            if (!std::isfinite(v)) throw ValidationError("polytope: non-finite generator entry");
    }
}

// Feasibility of sum(lambda_j g_j) = x, sum(lambda_j) = 1 over the listed
// generators, each lambda bounded below by `lower`. `skip` excludes one
// generator (redundancy checks); pass count() to keep all.
bool combination_feasible(const std::vector<std::vector<double>>& gens, std::size_t skip,
                          const std::vector<double>& x, double lower, double tol) {
    const std::size_t d = x.size();
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < gens.size(); ++j)
        if (j != skip) cols.push_back(j);
    if (cols.empty()) return false;

    FeasibilitySystem sys;
    sys.rows = d + 1;
    sys.cols = cols.size();
    sys.a.assign(sys.rows * sys.cols, 0.0);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        for (std::size_t i = 0; i < d; ++i) sys.a[i * sys.cols + c] = gens[cols[c]][i];
        sys.a[d * sys.cols + c] = 1.0;
    }
    sys.b = x;
    sys.b.push_back(1.0);
    if (lower > 0.0) sys.lower.assign(sys.cols, lower);
    return solve_equality_feasibility(sys, tol).feasible;
}

double l1_diameter(const std::vector<std::vector<double>>& gens) {
    double best = 0.0;
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = i + 1; j < gens.size(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < gens[i].size(); ++k)
                acc += std::abs(gens[i][k] - gens[j][k]);
            best = std::max(best, acc);
        }
    return best;
}

std::vector<double> centroid(const std::vector<std::vector<double>>& gens) {
    std::vector<double> c(gens.front().size(), 0.0);
    for (const auto& g : gens)
        for (std::size_t k = 0; k < c.size(); ++k) c[k] += g[k];
    for (double& v : c) v /= static_cast<double>(gens.size());
    return c;
}

std::vector<double> combine(const std::vector<std::vector<double>>& gens,
                            const std::vector<double>& lambda) {
    std::vector<double> x(gens.front().size(), 0.0);
    for (std::size_t j = 0; j < gens.size(); ++j)
        for (std::size_t k = 0; k < x.size(); ++k) x[k] += lambda[j] * gens[j][k];
    return x;
}

// Dirichlet weights conditioned on a minimum; after persistent rejection,
// shift mass uniformly, which guarantees the floor while keeping the sum.
std::vector<double> positive_weights(CounterRng& rng, std::size_t s, double floor) {
    floor = std::min(floor, 0.5 / static_cast<double>(s));
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<double> w = rng.dirichlet(s);
        if (*std::min_element(w.begin(), w.end()) >= floor) return w;
    }
    std::vector<double> w = rng.dirichlet(s);
    const double scale = 1.0 - static_cast<double>(s) * floor;
    for (double& v : w) v = scale * v + floor;
    return w;
}

std::vector<double> random_hull_point(CounterRng& rng, const PolytopeSpec& q) {
    return combine(q.generators(), rng.dirichlet(q.count()));
}

} // namespace

PolytopeSpec PolytopeSpec::from_generators(std::vector<std::vector<double>> generators) {
    validate_generators(generators);
    const std::vector<bool> flags = check_irredundant(generators);
    const bool all = std::all_of(flags.begin(), flags.end(), [](bool b) { return b; });
    const std::size_t d = generators.front().size();
    return PolytopeSpec(std::move(generators), d, all);
}

PolytopeSpec PolytopeSpec::from_generators_claimed(std::vector<std::vector<double>> generators,
                                                   bool irredundant) {
    validate_generators(generators);
    if (irredundant) {
        const std::vector<bool> flags = check_irredundant(generators);
        for (std::size_t j = 0; j < flags.size(); ++j)
            if (!flags[j])
                throw ValidationError("polytope: generator " + std::to_string(j + 1) +
                                      " is redundant but the list is claimed irredundant");
    }
    const std::size_t d = generators.front().size();
    return PolytopeSpec(std::move(generators), d, irredundant);
}

std::vector<bool> check_irredundant(const std::vector<std::vector<double>>& generators,
                                    double margin) {
    validate_generators(generators);
    std::vector<bool> flags(generators.size(), true);
    if (generators.size() == 1) return flags;
    for (std::size_t j = 0; j < generators.size(); ++j)
        flags[j] = !combination_feasible(generators, j, generators[j], 0.0, margin);
    return flags;
}

bool hull_membership(const PolytopeSpec& q, const std::vector<double>& x, double tol) {
    if (x.size() != q.ambient_dim()) throw DimensionMismatch("hull query: dimension mismatch");
    return combination_feasible(q.generators(), q.count(), x, 0.0, tol);
}

bool ri_membership(const PolytopeSpec& q, const std::vector<double>& x, double margin) {
    if (x.size() != q.ambient_dim())
        throw DimensionMismatch("relative-interior query: dimension mismatch");
    if (!q.irredundant())
        throw ValidationError(
            "relative-interior query requires an irredundant generator list");
    // Strict residual bound: the margin is only worth margin * geometry in
    // phase-1 residual, which the membership tolerance would swallow whole on
    // hulls of sub-unit diameter.
    return combination_feasible(q.generators(), q.count(), x, margin,
                                defaults::kStrictFeasibilityTol);
}

std::vector<std::vector<double>> ri_sample(const PolytopeSpec& q, std::size_t count,
                                           std::uint64_t seed) {
    if (!q.irredundant())
        throw ValidationError(
            "relative-interior sampling requires an irredundant generator list");
    CounterRng rng(seed);
    std::vector<std::vector<double>> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(combine(q.generators(),
                              positive_weights(rng, q.count(), defaults::kRiSampleFloor)));
    return out;
}

bool segment_extension_test(const PolytopeSpec& q, const std::vector<double>& x,
                            std::size_t probes, std::uint64_t seed) {
    if (x.size() != q.ambient_dim())
        throw DimensionMismatch("segment extension: dimension mismatch");
    if (!hull_membership(q, x))
        throw ValidationError("segment extension: point is outside the polytope");

    // The LP below always admits a sham solution (all weight on x, t at its
    // lower bound) with residual kMinExtension * |x - y|_1; only the strict
    // residual bound keeps that from passing for boundary points on hulls of
    // sub-unit diameter.
    constexpr double kMinExtension = 1e-9;
    const std::size_t d = q.ambient_dim();
    CounterRng rng(seed);

    std::vector<std::vector<double>> directions;
    directions.push_back(centroid(q.generators()));
    for (const auto& g : q.generators()) directions.push_back(g);
    while (directions.size() < probes) directions.push_back(random_hull_point(rng, q));
    if (directions.size() > probes && probes > 0) directions.resize(probes);

    for (const auto& y : directions) {
        double gap = 0.0;
        for (std::size_t k = 0; k < d; ++k) gap += std::abs(x[k] - y[k]);
        if (gap < 1e-9) continue; // y is x itself; the claim quantifies over Q minus x

        // z = x + t (x - y) must lie in the hull for some t >= kMinExtension:
        // sum(lambda_j g_j) - t (x - y) = x, sum(lambda_j) = 1.
        FeasibilitySystem sys;
        sys.rows = d + 1;
        sys.cols = q.count() + 1;
        sys.a.assign(sys.rows * sys.cols, 0.0);
        for (std::size_t j = 0; j < q.count(); ++j) {
            for (std::size_t i = 0; i < d; ++i) sys.a[i * sys.cols + j] = q.generators()[j][i];
            sys.a[d * sys.cols + j] = 1.0;
        }
        for (std::size_t i = 0; i < d; ++i) sys.a[i * sys.cols + q.count()] = -(x[i] - y[i]);
        sys.b = x;
        sys.b.push_back(1.0);
        sys.lower.assign(sys.cols, 0.0);
        sys.lower.back() = kMinExtension;
        if (!solve_equality_feasibility(sys, defaults::kStrictFeasibilityTol).feasible)
            return false;
    }
    return true;
}

bool half_open_segment_property_test(const PolytopeSpec& q, std::size_t trials,
                                     std::uint64_t seed) {
    if (!q.irredundant())
        throw ValidationError("half-open segment test requires an irredundant generator list");
    CounterRng rng(seed);
    // A positive floor on the mixing coefficient keeps the verified interior
    // coefficients an order above the membership margin.
    constexpr double kMuFloor = 0.01;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::vector<double> x =
            combine(q.generators(), positive_weights(rng, q.count(), defaults::kRiSampleFloor));
        const std::vector<double> y = (t % 2 == 0 && q.count() > 0)
                                          ? q.generators()[rng.uniform_index(q.count())]
                                          : random_hull_point(rng, q);
        const double mu = rng.uniform_range(kMuFloor, 1.0);
        std::vector<double> z(x.size());
        for (std::size_t k = 0; k < z.size(); ++k) z[k] = mu * x[k] + (1.0 - mu) * y[k];
        if (!ri_membership(q, z)) return false;
    }
    return true;
}

bool closure_density_test(const PolytopeSpec& q, std::size_t trials, std::uint64_t seed,
                          double epsilon) {
    if (!q.irredundant())
        throw ValidationError("closure density test requires an irredundant generator list");
    if (!(epsilon > 0.0)) throw ValidationError("closure density test: epsilon must be positive");
    CounterRng rng(seed);

    const std::vector<double> c = centroid(q.generators());
    const double diam = l1_diameter(q.generators());
    // Slide toward the centroid far enough to clear the membership margin,
    // close enough to stay within epsilon of the start.
    const double delta = diam > 0.0 ? std::min(0.5, epsilon / (2.0 * diam)) : 0.5;

    for (std::size_t t = 0; t < trials; ++t) {
        const std::vector<double> y =
            t < q.count() ? q.generators()[t] : random_hull_point(rng, q);
        std::vector<double> z(y.size());
        double dist = 0.0;
        for (std::size_t k = 0; k < z.size(); ++k) {
            z[k] = (1.0 - delta) * y[k] + delta * c[k];
            dist += std::abs(z[k] - y[k]);
        }
        if (dist > epsilon) return false;
        if (!ri_membership(q, z)) return false;
    }
    return true;
}

OperatorSpec interior_mix(const std::vector<OperatorSpec>& generator_pool,
                          std::uint64_t weights_seed) {
    if (generator_pool.empty()) throw ValidationError("interior mix: empty pool");
    const std::size_t m = generator_pool.front().dim();
    for (const auto& op : generator_pool)
        if (op.dim() != m) throw DimensionMismatch("interior mix: pool dimension mismatch");
    if (m > defaults::kMaxEnumerationDim)
        throw ValidationError("interior mix: permutation coverage check capped at m = " +
                              std::to_string(defaults::kMaxEnumerationDim));

    // Positive weight on every coordinate permutation is what collapses the
    // mix's fixed set to the barycenter and empties its periodic sets; a
    // pool missing one loses that argument.
    std::set<std::vector<std::size_t>> present;
    for (const auto& op : generator_pool) {
        if (!certify_bistochastic(op).certified)
            throw ValidationError("interior mix: pool operator lacks a certificate");
        if (op.kind() == OperatorSpec::Kind::Permutation) {
            present.insert(op.permutation_data().perm());
        } else if (op.kind() == OperatorSpec::Kind::LinearDS) {
            const auto& a = op.matrix_data();
            std::vector<std::size_t> perm(m, m);
            bool is_perm = true;
            for (std::size_t k = 0; k < m && is_perm; ++k)
                for (std::size_t i = 0; i < m && is_perm; ++i) {
                    const double v = a.at(k, i);
                    if (v == 1.0)
                        perm[k] = i;
                    else if (v != 0.0)
                        is_perm = false;
                }
            if (is_perm && std::find(perm.begin(), perm.end(), m) == perm.end())
                present.insert(perm);
        }
    }
    std::size_t factorial = 1;
    for (std::size_t i = 2; i <= m; ++i) factorial *= i;
    if (present.size() != factorial)
        throw ValidationError("interior mix: pool must contain all " + std::to_string(factorial) +
                              " coordinate permutations");

    CounterRng rng(weights_seed);
    const std::vector<double> w = positive_weights(rng, generator_pool.size(), 1e-3);
    return mix(generator_pool, w);
}

} // namespace qbo
