#pragma once

#include <cstdint>
#include <vector>

#include "qbo/operators.hpp"
#include "qbo/tolerances.hpp"

namespace qbo {

// Convex hull of finitely many points, kept in generator form. Relative
// interior queries are only answered for irredundant generator lists; the
// positive-coefficient characterization is wrong without that hypothesis.
class PolytopeSpec {
public:
    // Computes the irredundancy flag.
    static PolytopeSpec from_generators(std::vector<std::vector<double>> generators);
    // Verifies a claimed true flag (rejecting a false claim); a claimed
    // false flag is stored as-is.
    static PolytopeSpec from_generators_claimed(std::vector<std::vector<double>> generators,
                                                bool irredundant);

    std::size_t ambient_dim() const { return dim_; }
    std::size_t count() const { return generators_.size(); }
    const std::vector<std::vector<double>>& generators() const { return generators_; }
    bool irredundant() const { return irredundant_; }

private:
    PolytopeSpec(std::vector<std::vector<double>> generators, std::size_t dim, bool irredundant)
        : generators_(std::move(generators)), dim_(dim), irredundant_(irredundant) {}
    std::vector<std::vector<double>> generators_;
    std::size_t dim_ = 0;
    bool irredundant_ = false;
};

// Per-generator flags, true when the generator is NOT a convex combination
// of the others.
std::vector<bool> check_irredundant(const std::vector<std::vector<double>>& generators,
                                    double margin = defaults::kInteriorMargin);

bool hull_membership(const PolytopeSpec& q, const std::vector<double>& x,
                     double tol = defaults::kFeasibilityTol);

// True iff x admits generator coefficients all >= margin. Requires the
// irredundant flag; refuses otherwise.
bool ri_membership(const PolytopeSpec& q, const std::vector<double>& x,
                   double margin = defaults::kInteriorMargin);

std::vector<std::vector<double>> ri_sample(const PolytopeSpec& q, std::size_t count,
                                           std::uint64_t seed);

// For x in the hull: can every segment from a probe point y through x be
// extended strictly past x inside the hull? Equivalent to relative-interior
// membership; tested as such.
bool segment_extension_test(const PolytopeSpec& q, const std::vector<double>& x,
                            std::size_t probes, std::uint64_t seed);

// Segments from a relative-interior point stay in the relative interior up
// to (but excluding) the far endpoint.
bool half_open_segment_property_test(const PolytopeSpec& q, std::size_t trials,
                                     std::uint64_t seed);

// Every hull point has a relative-interior point within epsilon (l1).
bool closure_density_test(const PolytopeSpec& q, std::size_t trials, std::uint64_t seed,
                          double epsilon);

// Convex mix with strictly positive weights over a pool of certified
// operators that contains every coordinate permutation; such mixes leave
// only the barycenter fixed and no periodic orbits to find.
OperatorSpec interior_mix(const std::vector<OperatorSpec>& generator_pool,
                          std::uint64_t weights_seed);

} // namespace qbo
