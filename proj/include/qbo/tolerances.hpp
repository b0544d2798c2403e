#pragma once

#include <cstddef>

namespace qbo::defaults {

// Load-time sanitization of simplex points: coordinates in [-kCoordinateClamp, 0)
// are clamped to zero, and a coordinate sum within kLoadSumTolerance of 1 is
// renormalized.  Anything worse is rejected.
inline constexpr double kCoordinateClamp = 1e-12;
inline constexpr double kLoadSumTolerance = 1e-12;

// Operator outputs accumulate rounding over the quadratic form; their sums may
// drift further before renormalization than freshly loaded data.
inline constexpr double kApplySumTolerance = 1e-10;

// A prefix sum of the minorant may exceed the majorant's by this much and the
// comparison still passes.
inline constexpr double kMajorizationSlack = 1e-10;

// Linear-feasibility residual below which a system counts as feasible, and the
// strict-positivity margin used for relative-interior certificates.
inline constexpr double kFeasibilityTol = 1e-9;
inline constexpr double kInteriorMargin = 1e-9;

// Residual bound for feasibility systems that encode an exact identity rather
// than a perturbed membership.  Such systems solve to machine noise when
// genuinely feasible, so the bound can sit well below the margins above; a
// looser bound would absorb margin-times-geometry violations on hulls of
// sub-unit diameter.
inline constexpr double kStrictFeasibilityTol = 1e-12;

// Stochasticity checks on tensors, matrices, and mix weights.
inline constexpr double kStochasticityTol = 1e-12;

// Trajectory analysis.
inline constexpr double kConvergenceTol = 1e-10;   // l1 between successive iterates
inline constexpr double kFixedPointTol = 1e-9;     // residual ||V(x) - x||_1
inline constexpr double kCycleTol = 1e-9;          // revisit distance
inline constexpr double kClusterRadius = 1e-8;     // dedup radius for limit points

// A verified orbit must keep consecutive points at least this multiple of the
// revisit tolerance apart. Slowly contracting oscillation revisits itself at
// the noise scale near its limit; nothing that small is distinguishable from
// a fixed point at the working tolerance.
inline constexpr double kCycleSeparationFactor = 1000.0;

// Permutation-polytope membership enumerates m! vectors; refuse beyond this.
inline constexpr std::size_t kMaxEnumerationDim = 8;

// Tail window scanned for revisits, and the default period probe ceiling.
inline constexpr std::size_t kTrajectoryWindow = 512;
inline constexpr std::size_t kMaxProbePeriod = 64;

// Dirichlet draws for relative-interior sampling are conditioned on this floor.
inline constexpr double kRiSampleFloor = 1e-6;

} // namespace qbo::defaults
