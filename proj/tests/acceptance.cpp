// Acceptance gates: ten end-to-end checks, one output line each, nonzero
// exit when any gate fails. --only N runs a single gate; --cli PATH names
// the command line binary exercised by gate 10.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qbo/bistochastic.hpp"
#include "qbo/dynamics.hpp"
#include "qbo/json_io.hpp"
#include "qbo/operators.hpp"
#include "qbo/polytope.hpp"
#include "qbo/rng.hpp"
#include "qbo/sampling.hpp"
#include "qbo/simplex.hpp"
#include "support.hpp"

namespace {

struct GateResult {
    bool ok = true;
    std::string detail;
};

GateResult pass(std::string detail) { return {true, std::move(detail)}; }
GateResult fail(std::string detail) { return {false, std::move(detail)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_seconds(double secs) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(1);
    out << secs << "s";
    return out.str();
}

// Both answers to "is x reachable from y by averaging": the prefix-sum
// comparison and membership in the convex hull of y's rearrangements.
GateResult gate_majorization_routes() {
    const auto t0 = std::chrono::steady_clock::now();
    qbo::CounterRng rng(101);
    std::size_t compared = 0;
    for (std::size_t m = 2; m <= 5; ++m) {
        for (std::size_t trial = 0; trial < 1000; ++trial) {
            const qbo::SimplexPoint y = qbo::dirichlet_sample(rng, m);
            const qbo::SimplexPoint x = (trial % 2 == 0)
                                            ? testsupport::random_ds_image(rng, y)
                                            : qbo::dirichlet_sample(rng, m);
            const bool routes[2][2] = {
                {qbo::majorizes(y, x), qbo::in_permutation_polytope(x, y)},
                {qbo::majorizes(x, y), qbo::in_permutation_polytope(y, x)},
            };
            for (const auto& route : routes) {
                if (route[0] != route[1])
                    return fail("prefix-sum and hull-membership answers split at m = " +
                                std::to_string(m) + ", trial " + std::to_string(trial));
                ++compared;
            }
        }
    }
    const double secs = seconds_since(t0);
    if (secs >= 30.0)
        return fail("agreement held but took " + fmt_seconds(secs) + ", over the 30s allowance");
    return pass("both decision routes agree on " + std::to_string(compared) +
                " ordered pairs, m = 2..5");
}

GateResult gate_random_family_falsification() {
    const auto t0 = std::chrono::steady_clock::now();
    qbo::CounterRng rng(202);
    std::size_t survived = 0;
    for (std::size_t m = 2; m <= 6; ++m) {
        for (std::size_t trial = 0; trial < 20; ++trial) {
            const qbo::OperatorSpec op =
                qbo::make_family_va(qbo::random_doubly_stochastic(rng, m));
            const qbo::FalsifyReport report =
                qbo::falsify_bistochastic(op, 100000, rng.next_u64());
            if (report.verdict != qbo::FalsifyReport::Verdict::NoneFound)
                return fail("a quadratic family over a doubly stochastic matrix was flagged at "
                            "m = " +
                            std::to_string(m) + ", trial " + std::to_string(trial));
            ++survived;
        }
    }
    const double secs = seconds_since(t0);
    if (secs >= 120.0)
        return fail("all families survived but the sweep took " + fmt_seconds(secs) +
                    ", over the 120s allowance");
    return pass(std::to_string(survived) +
                " random-matrix families survive 100000-sample falsification, m = 2..6");
}

GateResult gate_uniform_family_settles() {
    for (std::size_t m = 2; m <= 10; ++m) {
        const qbo::OperatorSpec op = qbo::OperatorSpec::family_uniform(m);
        const qbo::SimplexPoint center = qbo::SimplexPoint::barycenter(m);
        qbo::CounterRng rng(303 + m);
        for (const qbo::SimplexPoint& start : qbo::trial_starts(rng, m, 1000)) {
            const qbo::TrajectoryRecord rec = qbo::iterate(op, start, 10000);
            if (rec.outcome != qbo::TrajectoryRecord::Outcome::Converged)
                return fail("a trajectory failed to settle at m = " + std::to_string(m));
            if (qbo::l1_distance(*rec.limit, center) >= 1e-8)
                return fail("a limit sits more than 1e-8 off the barycenter at m = " +
                            std::to_string(m));
        }
        for (std::size_t p = 2; p <= 16; ++p) {
            const auto orbits = qbo::periodic_points_probe(op, p, 8, 1000 * m + p);
            if (!orbits.empty())
                return fail("the period probe reported an orbit at m = " + std::to_string(m) +
                            ", p = " + std::to_string(p));
        }
    }
    return pass("9000 trajectories reach the barycenter within 1e-8 and every period probe "
                "up to 16 stays empty, m = 2..10");
}

GateResult gate_order_preservation() {
    for (std::size_t m = 2; m <= 8; ++m) {
        const qbo::OperatorSpec op = qbo::OperatorSpec::family_uniform(m);
        if (!qbo::sorting_cone_invariance_check(op, 10000, 404 + m))
            return fail("a sample broke the coordinate ordering at m = " + std::to_string(m));
    }
    return pass("coordinate ordering survives 10000 samples for each m = 2..8");
}

GateResult gate_mix_fixed_point_identity() {
    qbo::CounterRng rng(505);
    std::vector<std::vector<qbo::OperatorSpec>> perms;
    for (std::size_t m = 2; m <= 4; ++m) perms.push_back(qbo::all_permutation_operators(m));

    for (std::size_t c = 0; c < 50; ++c) {
        const std::size_t m = 2 + c % 3;
        const auto& perms_m = perms[m - 2];
        const std::size_t terms = 2 + rng.uniform_index(3);
        std::vector<qbo::OperatorSpec> pool;
        for (std::size_t j = 0; j < terms; ++j) {
            switch (rng.uniform_index(3)) {
                case 0:
                    pool.push_back(perms_m[rng.uniform_index(perms_m.size())]);
                    break;
                case 1:
                    pool.push_back(qbo::OperatorSpec::family_uniform(m));
                    break;
                default:
                    pool.push_back(qbo::make_family_va(qbo::random_doubly_stochastic(rng, m)));
                    break;
            }
        }
        // Floored weights keep every constituent's influence visible to the
        // fixed-point search.
        std::vector<double> weights = rng.dirichlet(terms);
        double total = 0.0;
        for (double& w : weights) {
            w += 0.05;
            total += w;
        }
        for (double& w : weights) w /= total;

        const qbo::IdentityReport report =
            qbo::check_mix_fix_identity(pool, weights, 12, rng.next_u64());
        if (!report.holds)
            return fail("fixed-point identity failed on pool " + std::to_string(c + 1) + ": " +
                        report.detail);
    }

    const auto [p1, p2] = qbo::fixture_counterexample_pair();
    const qbo::OperatorSpec mixed = qbo::mix({p1, p2}, {0.5, 0.5});
    const std::vector<qbo::SimplexPoint> fixed = qbo::find_fixed_points(mixed, 24, 7001);
    if (fixed.size() != 1)
        return fail("the half-and-half swap mix should leave one fixed point, found " +
                    std::to_string(fixed.size()));
    if (qbo::l1_distance(fixed.front(), qbo::SimplexPoint::barycenter(3)) >= 1e-9)
        return fail("the swap mix's fixed point sits more than 1e-9 off the barycenter");
    return pass("the identity holds on 50 random pools (m = 2..4) and the swap mix pins "
                "exactly the barycenter");
}

GateResult gate_two_step_orbits() {
    const auto [p1, p2] = qbo::fixture_counterexample_pair();
    for (const auto* swap : {&p1, &p2}) {
        const auto orbits = qbo::periodic_points_probe(*swap, 2, 16, 601);
        if (orbits.empty()) return fail("no two-step orbit surfaced for a lone swap");
        for (const qbo::PeriodicOrbit& orbit : orbits)
            if (orbit.prime_period != 2)
                return fail("a swap orbit verified with the wrong period");
    }
    const qbo::OperatorSpec mixed = qbo::mix({p1, p2}, {0.5, 0.5});
    const auto orbits = qbo::periodic_points_probe(mixed, 2, 1000, 603);
    if (!orbits.empty())
        return fail("the equal mix of the two swaps should admit no two-step orbit, found " +
                    std::to_string(orbits.size()));
    return pass("each swap shows a verified two-step orbit; their equal mix shows none "
                "across 1000 restarts");
}

GateResult gate_relative_interior_routes() {
    qbo::CounterRng rng(707);
    std::size_t compared = 0;
    for (std::size_t c = 0; c < 100; ++c) {
        const std::size_t d = 2 + c % 3;
        const std::size_t s = 3 + c % 6;
        const std::vector<std::vector<double>> gens =
            testsupport::random_irredundant_generators(rng, d, s);
        const qbo::PolytopeSpec q = qbo::PolytopeSpec::from_generators(gens);
        if (!q.irredundant())
            return fail("generator pruning left a redundant list in case " +
                        std::to_string(c + 1));

        std::vector<std::vector<double>> points = qbo::ri_sample(q, 20, rng.next_u64());
        for (const auto& g : q.generators()) points.push_back(g);
        for (std::size_t a = 0; points.size() < 40 && a + 1 < q.count(); ++a) {
            std::vector<double> mid(d, 0.0);
            for (std::size_t k = 0; k < d; ++k) mid[k] = 0.5 * (gens[a][k] + gens[a + 1][k]);
            points.push_back(std::move(mid));
        }
        while (points.size() < 50) {
            const std::vector<double> w = rng.dirichlet(q.count());
            std::vector<double> pt(d, 0.0);
            for (std::size_t j = 0; j < q.count(); ++j)
                for (std::size_t k = 0; k < d; ++k) pt[k] += w[j] * q.generators()[j][k];
            points.push_back(std::move(pt));
        }

        for (const std::vector<double>& pt : points) {
            const bool inner = qbo::ri_membership(q, pt);
            const bool extends = qbo::segment_extension_test(q, pt, 12, rng.next_u64());
            if (inner != extends)
                return fail("interior and segment-extension answers split in case " +
                            std::to_string(c + 1));
            ++compared;
        }
        if (!qbo::half_open_segment_property_test(q, 12, rng.next_u64()))
            return fail("a segment from the relative interior left it early in case " +
                        std::to_string(c + 1));
        if (!qbo::closure_density_test(q, 12, rng.next_u64(), 1e-6))
            return fail("a hull point found no relative-interior neighbor within 1e-6 in "
                        "case " +
                        std::to_string(c + 1));
    }
    return pass("interior and extension routes agree on " + std::to_string(compared) +
                " hull points; segment and density checks hold on all 100 hulls");
}

std::string verdict_name(const qbo::RegularityVerdict& v) {
    switch (v.classification) {
        case qbo::RegularityVerdict::Classification::StrictlyRegularEvidence:
            return "strictly-regular-evidence";
        case qbo::RegularityVerdict::Classification::RegularEvidence:
            return "regular-evidence";
        case qbo::RegularityVerdict::Classification::PeriodicOrbitFound:
            return "periodic-orbit-found";
        case qbo::RegularityVerdict::Classification::Inconclusive:
            return "inconclusive";
    }
    return "unknown";
}

GateResult gate_interior_mixes_classify() {
    qbo::CounterRng rng(808);
    for (std::size_t c = 0; c < 100; ++c) {
        const std::size_t m = 2 + c % 2;
        std::vector<qbo::OperatorSpec> pool = qbo::all_permutation_operators(m);
        if (c % 3 == 0) pool.push_back(qbo::OperatorSpec::family_uniform(m));
        const qbo::OperatorSpec op = qbo::interior_mix(pool, rng.next_u64());
        const qbo::RegularityVerdict v = qbo::classify_regularity(op, 12, 40000, 6, 909 + c);
        if (v.classification != qbo::RegularityVerdict::Classification::StrictlyRegularEvidence)
            return fail("interior mix " + std::to_string(c + 1) + " (m = " + std::to_string(m) +
                        ") classified as " + verdict_name(v));
    }

    const auto [p1, p2] = qbo::fixture_counterexample_pair();
    (void)p2;
    for (const double lambda : {0.1, 0.5, 0.9}) {
        const qbo::OperatorSpec blend =
            qbo::mix({qbo::OperatorSpec::family_uniform(3), p1}, {lambda, 1.0 - lambda});
        const qbo::RegularityVerdict v = qbo::classify_regularity(blend, 16, 40000, 6, 8800);
        if (v.classification != qbo::RegularityVerdict::Classification::StrictlyRegularEvidence)
            return fail("the swap blend at weight " + std::to_string(lambda) +
                        " classified as " + verdict_name(v));
    }
    return pass("100 interior mixes (m = 2, 3) and three swap blends all classify as "
                "strictly regular evidence");
}

GateResult gate_trajectories_respect_cone() {
    qbo::CounterRng rng(900);
    const auto [p1, p2] = qbo::fixture_counterexample_pair();

    std::vector<qbo::OperatorSpec> suite;
    suite.push_back(qbo::OperatorSpec::identity(3));
    const std::vector<qbo::OperatorSpec> perms3 = qbo::all_permutation_operators(3);
    suite.insert(suite.end(), perms3.begin(), perms3.end());
    for (std::size_t m = 2; m <= 6; ++m)
        suite.push_back(qbo::OperatorSpec::family_uniform(m));
    for (std::size_t m = 2; m <= 5; ++m)
        suite.push_back(qbo::make_family_va(qbo::random_doubly_stochastic(rng, m)));
    for (const std::size_t m : {std::size_t{3}, std::size_t{4}})
        suite.push_back(qbo::OperatorSpec::linear_ds(qbo::random_doubly_stochastic(rng, m)));
    suite.push_back(p1);
    suite.push_back(p2);
    suite.push_back(qbo::mix({p1, p2}, {0.5, 0.5}));
    suite.push_back(qbo::mix({qbo::OperatorSpec::family_uniform(3), p1,
                              qbo::make_family_va(qbo::random_doubly_stochastic(rng, 3))},
                             {0.4, 0.3, 0.3}));
    suite.push_back(qbo::OperatorSpec::composed(qbo::PermutationOperator::load({1, 2, 0}),
                                                qbo::OperatorSpec::family_uniform(3)));

    std::size_t compared = 0;
    for (std::size_t idx = 0; idx < suite.size(); ++idx) {
        const qbo::OperatorSpec& op = suite[idx];
        if (!qbo::certify_bistochastic(op).certified)
            return fail("suite entry " + std::to_string(idx + 1) + " failed to certify");
        qbo::CounterRng starts_rng(910 + idx);
        for (const qbo::SimplexPoint& start : qbo::trial_starts(starts_rng, op.dim(), 6)) {
            const qbo::TrajectoryRecord rec = qbo::iterate(op, start, 3000, {}, true);
            for (std::size_t n = 0; n + 1 < rec.iterates.size(); ++n) {
                if (!qbo::majorizes(rec.iterates[n].point, rec.iterates[n + 1].point))
                    return fail("a step left its predecessor's majorization cone on suite "
                                "entry " +
                                std::to_string(idx + 1));
                ++compared;
            }
        }
    }
    return pass("every recorded step of " + std::to_string(suite.size()) +
                " certified operators stays inside the cone (" + std::to_string(compared) +
                " comparisons)");
}

std::string capture_stdout(const std::string& cmd) {
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return out;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
    pclose(pipe);
    return out;
}

GateResult gate_cli_determinism(const std::string& cli) {
    if (cli.empty()) return fail("no command line binary given; pass --cli PATH");
    namespace fs = std::filesystem;
    const fs::path opfile = fs::temp_directory_path() / "qbo_acceptance_operator.json";

    const auto [p1, p2] = qbo::fixture_counterexample_pair();
    (void)p2;
    const qbo::OperatorSpec op =
        qbo::mix({qbo::OperatorSpec::family_uniform(3), p1}, {0.5, 0.5});
    {
        std::ofstream out(opfile);
        if (!out) return fail("cannot write the operator file for the classify run");
        out << qbo::json_to_text(qbo::operator_to_json(op));
    }

    const std::string cmd = "\"" + cli + "\" classify \"" + opfile.string() +
                            "\" --trials 8 --max-steps 4000 --max-period 4 --seed 11 "
                            "2>/dev/null";
    const std::string first = capture_stdout(cmd);
    const std::string second = capture_stdout(cmd);
    std::error_code ec;
    fs::remove(opfile, ec);

    if (first.empty()) return fail("the classify run produced no output");
    if (first.find("\"verdict\"") == std::string::npos)
        return fail("the classify output carries no verdict field");
    if (first != second) return fail("two classify runs with one seed differ");
    return pass("two identically seeded classify runs emit byte-identical reports");
}

} // namespace

int main(int argc, char** argv) {
    std::size_t only = 0;
    std::string cli;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--only" && i + 1 < argc) {
            only = static_cast<std::size_t>(std::stoul(argv[++i]));
        } else if (arg == "--cli" && i + 1 < argc) {
            cli = argv[++i];
        } else {
            std::fprintf(stderr, "usage: %s [--only N] [--cli PATH]\n", argv[0]);
            return 1;
        }
    }

    const std::vector<std::pair<const char*, std::function<GateResult()>>> gates = {
        {"majorization routes", gate_majorization_routes},
        {"random family falsification", gate_random_family_falsification},
        {"uniform family settles", gate_uniform_family_settles},
        {"order preservation", gate_order_preservation},
        {"mix fixed-point identity", gate_mix_fixed_point_identity},
        {"two-step orbits", gate_two_step_orbits},
        {"relative interior routes", gate_relative_interior_routes},
        {"interior mixes classify", gate_interior_mixes_classify},
        {"trajectories respect the cone", gate_trajectories_respect_cone},
        {"command line determinism", [&cli] { return gate_cli_determinism(cli); }},
    };

    bool all_ok = true;
    for (std::size_t i = 0; i < gates.size(); ++i) {
        if (only != 0 && only != i + 1) continue;
        const auto t0 = std::chrono::steady_clock::now();
        GateResult result;
        try {
            result = gates[i].second();
        } catch (const std::exception& e) {
            result = fail(std::string("unexpected exception: ") + e.what());
        }
        std::printf("criterion %2zu  %s  %8s  %s: %s\n", i + 1, result.ok ? "PASS" : "FAIL",
                    fmt_seconds(seconds_since(t0)).c_str(), gates[i].first,
                    result.detail.c_str());
        std::fflush(stdout);
        all_ok = all_ok && result.ok;
    }
    return all_ok ? 0 : 1;
}
