#include "qbo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <utility>

#include "qbo/errors.hpp"
#include "qbo/rng.hpp"
#include "qbo/sampling.hpp"

namespace qbo {

namespace {

// l1 distance with early exit once the partial sum clears `cap`; the cycle
// scan compares against hundreds of window entries that almost never match.
double l1_capped(const SimplexPoint& x, const SimplexPoint& y, double cap) {
    double acc = 0.0;
    for (std::size_t k = 0; k < x.dim(); ++k) {
        acc += std::abs(x[k] - y[k]);
        if (acc > cap) return acc;
    }
    return acc;
}

std::vector<std::size_t> proper_divisors(std::size_t p) {
    std::vector<std::size_t> divs;
    for (std::size_t q = 1; q < p; ++q)
        if (p % q == 0) divs.push_back(q);
    return divs;
}

// Forward images z, V(z), ..., V^p(z).
std::vector<SimplexPoint> forward_orbit(const OperatorSpec& op, const SimplexPoint& z,
                                        std::size_t p) {
    std::vector<SimplexPoint> pts;
    pts.reserve(p + 1);
    pts.push_back(z);
    for (std::size_t i = 0; i < p; ++i) pts.push_back(apply(op, pts.back()));
    return pts;
}

// Smallest verified return period given the p-step return already holds;
// p itself when no proper divisor returns.
std::size_t reduce_to_prime_period(const std::vector<SimplexPoint>& fwd, std::size_t p,
                                   double cycle_tol) {
    for (std::size_t q : proper_divisors(p))
        if (l1_capped(fwd[q], fwd[0], cycle_tol) < cycle_tol) return q;
    return p;
}

struct CycleCheck {
    bool verified = false;
    std::size_t prime_period = 0;
    std::vector<SimplexPoint> orbit;
};

// Confirms a p-step return from z and reduces to the prime period. The
// returned orbit starts at z.
CycleCheck verify_cycle(const OperatorSpec& op, const SimplexPoint& z, std::size_t p,
                        double cycle_tol) {
    CycleCheck out;
    const std::vector<SimplexPoint> fwd = forward_orbit(op, z, p);
    if (l1_capped(fwd[p], fwd[0], cycle_tol) >= cycle_tol) return out;
    const std::size_t prime = reduce_to_prime_period(fwd, p, cycle_tol);
    if (prime < 2) return out;
    // The candidate may reduce to a shorter cycle; re-verify the reduced one.
    if (prime != p && l1_capped(fwd[prime], fwd[0], cycle_tol) >= cycle_tol) return out;
    const double separation_floor = defaults::kCycleSeparationFactor * cycle_tol;
    for (std::size_t i = 0; i < prime; ++i)
        if (l1_distance(fwd[i], fwd[i + 1]) < separation_floor) return out;
    out.verified = true;
    out.prime_period = prime;
    out.orbit.assign(fwd.begin(), fwd.begin() + static_cast<std::ptrdiff_t>(prime));
    return out;
}

} // namespace

TrajectoryRecord iterate(const OperatorSpec& op, const SimplexPoint& x0,
                         std::size_t max_steps, const DynamicsTolerances& tol,
                         bool record_full, std::size_t window) {
    if (x0.dim() != op.dim()) throw DimensionMismatch("iterate: dimension mismatch");
    if (max_steps == 0) throw ValidationError("iterate: max_steps must be positive");
    if (window == 0) window = 1;

    TrajectoryRecord rec{x0};

    std::deque<RecordedIterate> tail;
    auto push = [&](std::size_t step, const SimplexPoint& pt) {
        tail.push_back({step, pt});
        if (!record_full && tail.size() > window) tail.pop_front();
    };
    auto finish = [&](TrajectoryRecord::Outcome outcome, std::size_t steps) {
        rec.outcome = outcome;
        rec.steps_taken = steps;
        rec.iterates.assign(tail.begin(), tail.end());
        return rec;
    };

    push(0, x0);
    SimplexPoint prev = x0;
    if (l1_distance(apply(op, x0), x0) < tol.fixed_point) {
        rec.limit = x0;
        return finish(TrajectoryRecord::Outcome::Converged, 0);
    }

    for (std::size_t n = 1; n <= max_steps; ++n) {
        const SimplexPoint cur = apply(op, prev);
        push(n, cur);

        // Revisit scan, nearest iterate first. Runs before the convergence
        // test: an exact swap cycle never shrinks successive distances.
        for (auto it = tail.rbegin() + 1; it != tail.rend(); ++it) {
            const std::size_t p = n - it->step;
            if (p < 2) continue;
            if (l1_capped(cur, it->point, tol.cycle) >= tol.cycle) continue;
            const CycleCheck check = verify_cycle(op, cur, p, tol.cycle);
            if (check.verified) {
                rec.orbit = check.orbit;
                rec.prime_period = check.prime_period;
                return finish(TrajectoryRecord::Outcome::Cycle, n);
            }
        }

        if (l1_distance(cur, prev) < tol.convergence &&
            l1_distance(apply(op, cur), cur) < tol.fixed_point) {
            rec.limit = cur;
            return finish(TrajectoryRecord::Outcome::Converged, n);
        }
        prev = cur;
    }
    return finish(TrajectoryRecord::Outcome::BudgetExhausted, max_steps);
}

std::vector<SimplexPoint> find_fixed_points(const OperatorSpec& op, std::size_t trials,
                                            std::uint64_t seed, const DynamicsTolerances& tol,
                                            std::size_t max_steps) {
    const std::size_t m = op.dim();
    CounterRng rng(seed);

    std::vector<SimplexPoint> found;
    auto offer = [&](const SimplexPoint& candidate) {
        // Refinement: extra applications cost little and tighten limits that
        // stopped right at the convergence threshold.
        SimplexPoint z = candidate;
        for (int i = 0; i < 32; ++i) {
            const SimplexPoint next = apply(op, z);
            if (l1_distance(next, z) >= tol.convergence) break;
            z = next;
        }
        if (l1_distance(apply(op, z), z) >= tol.fixed_point) return;
        for (const SimplexPoint& have : found)
            if (l1_capped(have, z, tol.cluster) < tol.cluster) return;
        found.push_back(z);
    };

    offer(SimplexPoint::barycenter(m));
    for (const SimplexPoint& start : trial_starts(rng, m, std::max<std::size_t>(trials, 1))) {
        const TrajectoryRecord rec = iterate(op, start, max_steps, tol);
        if (rec.outcome == TrajectoryRecord::Outcome::Converged) offer(*rec.limit);
    }
    return found;
}

std::vector<PeriodicOrbit> periodic_points_probe(const OperatorSpec& op, std::size_t p,
                                                 std::size_t trials, std::uint64_t seed,
                                                 const DynamicsTolerances& tol,
                                                 std::size_t max_steps) {
    if (p < 2) throw ValidationError("periodic probe: period must be at least 2");
    const std::size_t m = op.dim();
    CounterRng rng(seed);

    std::vector<PeriodicOrbit> orbits;
    auto offer = [&](const SimplexPoint& z) {
        const CycleCheck check = verify_cycle(op, z, p, tol.cycle);
        if (!check.verified || check.prime_period != p) return;
        // Same orbit found from another phase: compare against every stored
        // point, not just representatives, since orbits have no canonical
        // basepoint.
        for (const PeriodicOrbit& have : orbits)
            for (const SimplexPoint& pt : have.orbit)
                if (l1_capped(pt, z, tol.cluster) < tol.cluster) return;
        orbits.push_back(PeriodicOrbit{check.orbit, check.prime_period});
    };

    const std::vector<SimplexPoint> starts =
        trial_starts(rng, m, std::max<std::size_t>(trials, 1));

    // Direct route: the trajectory itself settles into a p-cycle.
    for (const SimplexPoint& start : starts) {
        const TrajectoryRecord rec = iterate(op, start, max_steps, tol);
        if (rec.outcome == TrajectoryRecord::Outcome::Cycle && rec.prime_period == p)
            offer(rec.orbit.front());
    }

    // Composition route: a fixed point of the p-fold map that no proper
    // divisor fixes is a prime p-cycle; catches cycles that are stable for
    // V^p but not approached cyclically.
    const std::size_t max_outer = std::max<std::size_t>(64, max_steps / p);
    for (const SimplexPoint& start : starts) {
        SimplexPoint z = start;
        for (std::size_t outer = 0; outer < max_outer; ++outer) {
            SimplexPoint next = z;
            for (std::size_t i = 0; i < p; ++i) next = apply(op, next);
            const double step_l1 = l1_distance(next, z);
            z = next;
            if (step_l1 < tol.convergence) break;
        }
        SimplexPoint ret = z;
        for (std::size_t i = 0; i < p; ++i) ret = apply(op, ret);
        if (l1_distance(ret, z) < tol.cycle) offer(z);
    }
    return orbits;
}

IdentityReport check_mix_fix_identity(const std::vector<OperatorSpec>& ops,
                                      const std::vector<double>& weights,
                                      std::size_t trials, std::uint64_t seed,
                                      double tolerance) {
    const OperatorSpec mixed = mix(ops, weights);
    IdentityReport report;
    report.holds = true;

    const std::vector<SimplexPoint> mix_fixed = find_fixed_points(mixed, trials, seed);
    report.mix_fixed_count = mix_fixed.size();
    for (const SimplexPoint& z : mix_fixed)
        for (std::size_t i = 0; i < ops.size(); ++i)
            if (l1_distance(apply(ops[i], z), z) > tolerance) {
                report.holds = false;
                report.violating_point = z;
                report.detail = "mix fixed point moves under constituent " + std::to_string(i + 1);
                return report;
            }

    // Common fixed points: survivors of the first constituent's list under
    // every other constituent.
    std::vector<SimplexPoint> common = find_fixed_points(ops.front(), trials, seed + 1);
    for (std::size_t i = 1; i < ops.size(); ++i) {
        std::vector<SimplexPoint> next;
        for (const SimplexPoint& z : common)
            if (l1_distance(apply(ops[i], z), z) <= tolerance) next.push_back(z);
        common = std::move(next);
    }
    report.common_fixed_count = common.size();
    for (const SimplexPoint& z : common)
        if (l1_distance(apply(mixed, z), z) > tolerance) {
            report.holds = false;
            report.violating_point = z;
            report.detail = "common constituent fixed point moves under the mix";
            return report;
        }
    return report;
}

RegularityVerdict classify_regularity(const OperatorSpec& op, std::size_t trials,
                                      std::size_t max_steps, std::size_t periods_to_probe,
                                      std::uint64_t seed, const DynamicsTolerances& tol) {
    const std::size_t m = op.dim();
    CounterRng rng(seed);

    RegularityVerdict verdict;
    verdict.trials = trials;
    verdict.max_period_probed = periods_to_probe;
    verdict.tolerances = tol;

    const SimplexPoint center = SimplexPoint::barycenter(m);
    bool all_converged = true;
    bool all_to_barycenter = true;
    for (const SimplexPoint& start : trial_starts(rng, m, std::max<std::size_t>(trials, 1))) {
        const TrajectoryRecord rec = iterate(op, start, max_steps, tol);
        switch (rec.outcome) {
            case TrajectoryRecord::Outcome::Cycle:
                verdict.classification = RegularityVerdict::Classification::PeriodicOrbitFound;
                verdict.witness = PeriodicOrbit{rec.orbit, rec.prime_period};
                return verdict;
            case TrajectoryRecord::Outcome::BudgetExhausted:
                all_converged = false;
                break;
            case TrajectoryRecord::Outcome::Converged:
                if (l1_distance(*rec.limit, center) >= tol.cluster) all_to_barycenter = false;
                break;
        }
    }

    const std::size_t probe_trials = std::max<std::size_t>(4, trials / 8);
    for (std::size_t p = 2; p <= periods_to_probe; ++p) {
        const auto orbits =
            periodic_points_probe(op, p, probe_trials, rng.next_u64(), tol, max_steps);
        if (!orbits.empty()) {
            verdict.classification = RegularityVerdict::Classification::PeriodicOrbitFound;
            verdict.witness = orbits.front();
            return verdict;
        }
    }

    if (!all_converged) {
        verdict.classification = RegularityVerdict::Classification::Inconclusive;
    } else if (all_to_barycenter) {
        verdict.classification = RegularityVerdict::Classification::StrictlyRegularEvidence;
    } else {
        verdict.classification = RegularityVerdict::Classification::RegularEvidence;
    }
    return verdict;
}

std::vector<SimplexPoint> omega_limit_estimate(const OperatorSpec& op, const SimplexPoint& x0,
                                               std::size_t burn_in, std::size_t window,
                                               const DynamicsTolerances& tol) {
    if (x0.dim() != op.dim()) throw DimensionMismatch("omega-limit: dimension mismatch");
    SimplexPoint z = x0;
    for (std::size_t i = 0; i < burn_in; ++i) z = apply(op, z);
    std::vector<SimplexPoint> reps;
    for (std::size_t i = 0; i < std::max<std::size_t>(window, 1); ++i) {
        bool known = false;
        for (const SimplexPoint& rep : reps)
            if (l1_capped(rep, z, tol.cluster) < tol.cluster) {
                known = true;
                break;
            }
        if (!known) reps.push_back(z);
        z = apply(op, z);
    }
    return reps;
}

} // namespace qbo
