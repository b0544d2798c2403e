#include "qbo/bistochastic.hpp"

#include <cmath>
#include <utility>

#include "qbo/errors.hpp"
#include "qbo/rng.hpp"
#include "qbo/sampling.hpp"
#include "qbo/tolerances.hpp"

namespace qbo {

namespace {

// Smallest 1-based prefix index where x's image escapes the majorization
// cone, recomputed from scratch so the report stands on its own.
std::optional<std::size_t> first_violated_prefix(const SimplexPoint& x, const SimplexPoint& vx) {
    const std::vector<double> px = descending_prefix_sums(x);
    const std::vector<double> pv = descending_prefix_sums(vx);
    for (std::size_t k = 0; k + 1 < px.size(); ++k)
        if (pv[k] > px[k] + defaults::kMajorizationSlack) return k + 1;
    return std::nullopt;
}

class FalsifySearch {
public:
    FalsifySearch(const OperatorSpec& op, std::size_t budget, std::uint64_t seed)
        : op_(op), budget_(budget), rng_(seed) {
        report_.seed = seed;
    }

    // False once the budget is exhausted or a counterexample is recorded.
    bool check(const SimplexPoint& x) {
        if (done()) return false;
        ++report_.samples_used;
        const SimplexPoint vx = apply(op_, x);
        if (!majorizes(x, vx)) {
            const auto prefix = first_violated_prefix(x, vx);
            if (prefix) {
                report_.verdict = FalsifyReport::Verdict::CounterexampleFound;
                report_.x = x;
                report_.vx = vx;
                report_.violating_prefix = prefix;
                return false;
            }
        }
        return !done();
    }

    bool done() const {
        return report_.samples_used >= budget_ ||
               report_.verdict == FalsifyReport::Verdict::CounterexampleFound;
    }

    FalsifyReport take() && { return std::move(report_); }

    CounterRng& rng() { return rng_; }

private:
    const OperatorSpec& op_;
    std::size_t budget_;
    CounterRng rng_;
    FalsifyReport report_;
};

} // namespace

FalsifyReport falsify_bistochastic(const OperatorSpec& op, std::size_t budget,
                                   std::uint64_t seed) {
    if (budget == 0) throw BudgetError("falsification budget must be positive");
    const std::size_t m = op.dim();
    FalsifySearch search(op, budget, seed);

    // Violations concentrate near low-dimensional faces, so a fifth of the
    // budget goes to deterministic vertices and edge midpoints, a fifth to
    // random faces, a fifth to trajectory drift, the rest to the interior.
    const std::size_t share = budget / 5;
    const std::size_t n_boundary = share;
    const std::size_t n_faces = m >= 2 ? share : 0;
    const std::size_t n_traj = share;

    std::size_t spent_boundary = 0;
    for (std::size_t i = 0; i < m && spent_boundary < n_boundary; ++i, ++spent_boundary)
        if (!search.check(SimplexPoint::vertex(m, i))) return std::move(search).take();
    for (std::size_t i = 0; i < m && spent_boundary < n_boundary; ++i)
        for (std::size_t j = i + 1; j < m && spent_boundary < n_boundary; ++j, ++spent_boundary) {
            std::vector<double> mid(m, 0.0);
            mid[i] = 0.5;
            mid[j] = 0.5;
            if (!search.check(SimplexPoint::load(mid))) return std::move(search).take();
        }
    while (spent_boundary < n_boundary && m >= 2) {
        const std::size_t i = search.rng().uniform_index(m);
        std::size_t j = search.rng().uniform_index(m - 1);
        if (j >= i) ++j;
        const double t = search.rng().uniform01();
        std::vector<double> pt(m, 0.0);
        pt[i] = t;
        pt[j] = 1.0 - t;
        ++spent_boundary;
        if (!search.check(SimplexPoint::load(pt))) return std::move(search).take();
    }
    for (std::size_t i = 0; i < n_faces; ++i)
        if (!search.check(random_face_point(search.rng(), m))) return std::move(search).take();

    std::size_t spent_traj = 0;
    while (spent_traj < n_traj) {
        SimplexPoint x = dirichlet_sample(search.rng(), m);
        for (std::size_t step = 0; step < 8 && spent_traj < n_traj; ++step, ++spent_traj) {
            if (!search.check(x)) return std::move(search).take();
            x = apply(op, x);
        }
    }

    while (!search.done())
        if (!search.check(dirichlet_sample(search.rng(), m))) break;
    return std::move(search).take();
}

CertificateResult certify_bistochastic(const OperatorSpec& op) {
    switch (op.kind()) {
        case OperatorSpec::Kind::Permutation:
            return {true, Certificate{"permutation", {}}};
        case OperatorSpec::Kind::LinearDS:
            return {true, Certificate{"birkhoff-linear", {}}};
        case OperatorSpec::Kind::FamilyVA:
            return {true, Certificate{"va-family", {}}};
        case OperatorSpec::Kind::FamilyUniform:
            return {true, Certificate{"uniform-family", {}}};
        case OperatorSpec::Kind::Mix: {
            Certificate cert{"convex-mix-closure", {}};
            for (const auto& term : op.mix_terms()) {
                CertificateResult sub = certify_bistochastic(term.op);
                if (!sub.certified) return {false, std::nullopt};
                cert.premises.push_back(std::move(*sub.certificate));
            }
            return {true, std::move(cert)};
        }
        case OperatorSpec::Kind::Composed: {
            CertificateResult sub = certify_bistochastic(op.inner());
            if (!sub.certified) return {false, std::nullopt};
            return {true, Certificate{"permutation-composition", {std::move(*sub.certificate)}}};
        }
        case OperatorSpec::Kind::Tensor:
            return {false, std::nullopt};
    }
    return {false, std::nullopt};
}

OperatorSpec make_family_va(const DoublyStochasticMatrix& a) {
    return OperatorSpec::family_va(a);
}

bool sorting_cone_invariance_check(const OperatorSpec& op, std::size_t samples,
                                   std::uint64_t seed) {
    const std::size_t m = op.dim();
    if (m < 2) return true;
    constexpr double kOrderTie = 1e-12;
    CounterRng rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        SimplexPoint x = dirichlet_sample(rng, m);
        if (s % 2 == 1) {
            // Force an exact tie; ties may break either way without fault.
            std::vector<double> c = x.coords();
            const std::size_t i = rng.uniform_index(m);
            std::size_t j = rng.uniform_index(m - 1);
            if (j >= i) ++j;
            const double avg = 0.5 * (c[i] + c[j]);
            c[i] = avg;
            c[j] = avg;
            x = SimplexPoint::load(c);
        }
        const SimplexPoint y = apply(op, x);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                if (i == j) continue;
                if (x[i] - x[j] > kOrderTie && y[j] - y[i] > kOrderTie) return false;
            }
    }
    return true;
}

} // namespace qbo
