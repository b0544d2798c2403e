#include <doctest.h>

#include <vector>

#include "qbo/bistochastic.hpp"
#include "qbo/errors.hpp"
#include "qbo/operators.hpp"
#include "qbo/rng.hpp"
#include "qbo/sampling.hpp"
#include "qbo/simplex.hpp"

#include "support.hpp"

using qbo::DoublyStochasticMatrix;
using qbo::FalsifyReport;
using qbo::OperatorSpec;
using qbo::PermutationOperator;
using qbo::QsoTensor;
using qbo::SimplexPoint;

namespace {

OperatorSpec known_escaping_tensor() {
    return OperatorSpec::tensor(QsoTensor::load({{{1.0, 0.0}, {1.0, 0.0}},
                                                 {{1.0, 0.0}, {0.0, 1.0}}}));
}

} // namespace

TEST_SUITE("bistochastic") {

TEST_CASE("falsifier catches the known escaping tensor at the edge midpoint") {
    const FalsifyReport r = qbo::falsify_bistochastic(known_escaping_tensor(), 200, 1);
    REQUIRE(r.verdict == FalsifyReport::Verdict::CounterexampleFound);
    // Deterministic probe order: two vertices pass, the midpoint fails.
    CHECK(r.samples_used == 3);
    REQUIRE(r.x.has_value());
    REQUIRE(r.vx.has_value());
    CHECK(r.x->coords() == std::vector<double>{0.5, 0.5});
    CHECK((*r.vx)[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK_FALSE(qbo::majorizes(*r.x, *r.vx));
    REQUIRE(r.violating_prefix.has_value());
    CHECK(*r.violating_prefix == 1);
}

TEST_CASE("reported counterexamples are self-certifying") {
    // Whatever point the search lands on, the recorded pair must violate the
    // prefix inequality it names.
    const FalsifyReport r = qbo::falsify_bistochastic(known_escaping_tensor(), 500, 99);
    REQUIRE(r.verdict == FalsifyReport::Verdict::CounterexampleFound);
    const std::vector<double> px = qbo::descending_prefix_sums(*r.x);
    const std::vector<double> pv = qbo::descending_prefix_sums(*r.vx);
    const std::size_t k = *r.violating_prefix;
    REQUIRE(k >= 1);
    REQUIRE(k < px.size());
    CHECK(pv[k - 1] > px[k - 1] + 1e-10);
}

TEST_CASE("falsifier exhausts the budget on certified operators") {
    const FalsifyReport r = qbo::falsify_bistochastic(OperatorSpec::family_uniform(3), 300, 5);
    CHECK(r.verdict == FalsifyReport::Verdict::NoneFound);
    CHECK(r.samples_used == 300);
    CHECK_FALSE(r.x.has_value());
}

TEST_CASE("falsifier finds nothing on permutations and linear maps") {
    qbo::CounterRng rng(51);
    for (int t = 0; t < 6; ++t) {
        const std::size_t m = 2 + rng.uniform_index(4);
        const OperatorSpec p = OperatorSpec::permutation(
            PermutationOperator::load(qbo::random_permutation(rng, m)));
        CHECK(qbo::falsify_bistochastic(p, 150, rng.next_u64()).verdict ==
              FalsifyReport::Verdict::NoneFound);
        const OperatorSpec lin =
            OperatorSpec::linear_ds(qbo::random_doubly_stochastic(rng, m));
        CHECK(qbo::falsify_bistochastic(lin, 150, rng.next_u64()).verdict ==
              FalsifyReport::Verdict::NoneFound);
    }
}

TEST_CASE("falsifier is reproducible for a fixed seed") {
    const OperatorSpec op = known_escaping_tensor();
    const FalsifyReport a = qbo::falsify_bistochastic(op, 400, 12345);
    const FalsifyReport b = qbo::falsify_bistochastic(op, 400, 12345);
    CHECK(a.samples_used == b.samples_used);
    REQUIRE(a.x.has_value());
    REQUIRE(b.x.has_value());
    CHECK(a.x->coords() == b.x->coords());
    CHECK(a.vx->coords() == b.vx->coords());
}

TEST_CASE("falsifier rejects a zero budget") {
    CHECK_THROWS_AS(qbo::falsify_bistochastic(OperatorSpec::family_uniform(2), 0, 1),
                    qbo::BudgetError);
}

TEST_CASE("certificates name the closure rule that applies") {
    CHECK(qbo::certify_bistochastic(OperatorSpec::identity(3)).certificate->rule ==
          "permutation");
    CHECK(qbo::certify_bistochastic(
              OperatorSpec::linear_ds(DoublyStochasticMatrix::uniform(3)))
              .certificate->rule == "birkhoff-linear");
    CHECK(qbo::certify_bistochastic(
              qbo::make_family_va(DoublyStochasticMatrix::uniform(3)))
              .certificate->rule == "va-family");
    CHECK(qbo::certify_bistochastic(OperatorSpec::family_uniform(4)).certificate->rule ==
          "uniform-family");
}

TEST_CASE("mix certificates carry one premise per constituent") {
    const auto [p1, p2] = qbo::fixture_counterexample_pair();
    const auto res = qbo::certify_bistochastic(qbo::mix({p1, p2}, {0.5, 0.5}));
    REQUIRE(res.certified);
    CHECK(res.certificate->rule == "convex-mix-closure");
    REQUIRE(res.certificate->premises.size() == 2);
    CHECK(res.certificate->premises[0].rule == "birkhoff-linear");
}

TEST_CASE("composition certificates wrap the inner certificate") {
    const OperatorSpec wrapped = qbo::compose_with_permutation(
        PermutationOperator::load({1, 2, 0}), OperatorSpec::family_uniform(3));
    REQUIRE(wrapped.kind() == OperatorSpec::Kind::Composed);
    const auto res = qbo::certify_bistochastic(wrapped);
    REQUIRE(res.certified);
    CHECK(res.certificate->rule == "permutation-composition");
    REQUIRE(res.certificate->premises.size() == 1);
    CHECK(res.certificate->premises[0].rule == "uniform-family");
}

TEST_CASE("tensors are never structurally certified") {
    CHECK_FALSE(qbo::certify_bistochastic(known_escaping_tensor()).certified);
    // Sound but incomplete: even a tensor that IS bistochastic stays Unknown.
    CHECK_FALSE(
        qbo::certify_bistochastic(OperatorSpec::tensor(QsoTensor::identity(3))).certified);
    // A mix is only as certified as its weakest constituent.
    const OperatorSpec tainted =
        qbo::mix({OperatorSpec::family_uniform(2), known_escaping_tensor()}, {0.5, 0.5});
    CHECK_FALSE(qbo::certify_bistochastic(tainted).certified);
}

TEST_CASE("certified operators survive heavy falsification") {
    qbo::CounterRng rng(52);
    for (int t = 0; t < 4; ++t) {
        const std::size_t m = 2 + rng.uniform_index(3);
        std::vector<OperatorSpec> pool;
        pool.push_back(OperatorSpec::family_uniform(m));
        pool.push_back(qbo::make_family_va(qbo::random_doubly_stochastic(rng, m)));
        pool.push_back(OperatorSpec::linear_ds(qbo::random_doubly_stochastic(rng, m)));
        const OperatorSpec mixed = qbo::mix(pool, rng.dirichlet(3));
        REQUIRE(qbo::certify_bistochastic(mixed).certified);
        const FalsifyReport r = qbo::falsify_bistochastic(mixed, 600, rng.next_u64());
        CHECK(r.verdict == FalsifyReport::Verdict::NoneFound);
    }
}

TEST_CASE("order preservation holds for order-compatible operators") {
    CHECK(qbo::sorting_cone_invariance_check(OperatorSpec::family_uniform(3), 200, 61));
    CHECK(qbo::sorting_cone_invariance_check(OperatorSpec::family_uniform(5), 200, 62));
    CHECK(qbo::sorting_cone_invariance_check(OperatorSpec::identity(4), 100, 63));
    // Everything maps to the barycenter: only ties, no contradictions.
    CHECK(qbo::sorting_cone_invariance_check(
        OperatorSpec::linear_ds(DoublyStochasticMatrix::uniform(3)), 100, 64));
}

TEST_CASE("order preservation fails for coordinate swaps") {
    CHECK_FALSE(qbo::sorting_cone_invariance_check(
        OperatorSpec::permutation(PermutationOperator::load({1, 0})), 50, 65));
    CHECK_FALSE(qbo::sorting_cone_invariance_check(
        qbo::make_family_va(DoublyStochasticMatrix::load({{0.0, 1.0}, {1.0, 0.0}})), 50, 66));
}

} // TEST_SUITE
