#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <string>
#include <vector>

#include "qbo/operators.hpp"
#include "qbo/simplex.hpp"
#include "qbo/tolerances.hpp"

namespace qbo {

struct DynamicsTolerances {
    double convergence = defaults::kConvergenceTol; // successive-iterate l1
    double fixed_point = defaults::kFixedPointTol;  // residual of a claimed limit
    double cycle = defaults::kCycleTol;             // revisit / p-step return
    double cluster = defaults::kClusterRadius;      // dedup radius
};

struct RecordedIterate {
    std::size_t step;
    SimplexPoint point;
};

struct TrajectoryRecord {
    enum class Outcome { Converged, Cycle, BudgetExhausted };

    explicit TrajectoryRecord(SimplexPoint s) : start(std::move(s)) {}

    SimplexPoint start;
    // Tail window of the trajectory (full when requested); step 0 is x0.
    std::vector<RecordedIterate> iterates;
    std::size_t steps_taken = 0;
    Outcome outcome = Outcome::BudgetExhausted;
    std::optional<SimplexPoint> limit;  // Converged
    std::vector<SimplexPoint> orbit;    // Cycle: p points starting anywhere on the orbit
    std::size_t prime_period = 0;       // Cycle: smallest verified return period, >= 2
};

// Runs x -> op(x) up to max_steps applications. Cycle detection scans the
// recorded window before the convergence test each step; a candidate period
// is only reported after re-iteration verifies the return and rules out
// every proper divisor.
TrajectoryRecord iterate(const OperatorSpec& op, const SimplexPoint& x0,
                         std::size_t max_steps, const DynamicsTolerances& tol = {},
                         bool record_full = false,
                         std::size_t window = defaults::kTrajectoryWindow);

// Fixed points harvested from trajectory limits over stress starts, refined
// and deduplicated. The barycenter leads the list whenever it verifies.
std::vector<SimplexPoint> find_fixed_points(const OperatorSpec& op, std::size_t trials,
                                            std::uint64_t seed,
                                            const DynamicsTolerances& tol = {},
                                            std::size_t max_steps = 2000);

struct PeriodicOrbit {
    std::vector<SimplexPoint> orbit; // prime_period points
    std::size_t prime_period = 0;
};

// Search for orbits of prime period exactly p: direct cycle verdicts plus
// convergence of the p-fold composition. Every returned orbit re-verifies
// the p-step return and the failure of all proper divisors.
std::vector<PeriodicOrbit> periodic_points_probe(const OperatorSpec& op, std::size_t p,
                                                 std::size_t trials, std::uint64_t seed,
                                                 const DynamicsTolerances& tol = {},
                                                 std::size_t max_steps = 4096);

struct IdentityReport {
    bool holds = false;
    std::size_t mix_fixed_count = 0;
    std::size_t common_fixed_count = 0;
    std::optional<SimplexPoint> violating_point;
    std::string detail;
};

// Cross-checks the fixed points of a weighted mix against the common fixed
// points of its constituents, in both directions. The comparison tolerance
// is looser than the solver tolerances because each side's points carry
// their own convergence error.
IdentityReport check_mix_fix_identity(const std::vector<OperatorSpec>& ops,
                                      const std::vector<double>& weights,
                                      std::size_t trials, std::uint64_t seed,
                                      double tolerance = 1e-6);

struct RegularityVerdict {
    enum class Classification {
        StrictlyRegularEvidence,
        RegularEvidence,
        PeriodicOrbitFound,
        Inconclusive,
    };

    Classification classification = Classification::Inconclusive;
    std::size_t trials = 0;
    std::size_t max_period_probed = 0;
    DynamicsTolerances tolerances;
    std::optional<PeriodicOrbit> witness; // PeriodicOrbitFound
};

// Empirical classification; "evidence" is load-bearing, sampling can never
// prove the absence of periodic points. Meaningful for operators whose
// images stay inside the majorization cone.
RegularityVerdict classify_regularity(const OperatorSpec& op, std::size_t trials,
                                      std::size_t max_steps, std::size_t periods_to_probe,
                                      std::uint64_t seed,
                                      const DynamicsTolerances& tol = {});

// Cluster representatives of the post-burn-in iterate window.
std::vector<SimplexPoint> omega_limit_estimate(const OperatorSpec& op, const SimplexPoint& x0,
                                               std::size_t burn_in, std::size_t window,
                                               const DynamicsTolerances& tol = {});

} // namespace qbo
