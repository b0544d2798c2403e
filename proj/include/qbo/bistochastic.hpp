#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qbo/operators.hpp"
#include "qbo/simplex.hpp"

namespace qbo {

// Outcome of randomized search for a point whose image is not majorized by
// it. "none-found" is evidence, not proof.
struct FalsifyReport {
    enum class Verdict { CounterexampleFound, NoneFound };
    Verdict verdict = Verdict::NoneFound;
    std::size_t samples_used = 0;
    std::uint64_t seed = 0;
    std::optional<SimplexPoint> x;
    std::optional<SimplexPoint> vx;
    // 1-based index of the first violated prefix-sum inequality.
    std::optional<std::size_t> violating_prefix;
};

FalsifyReport falsify_bistochastic(const OperatorSpec& op, std::size_t budget,
                                   std::uint64_t seed);

// Structural proof sketch: which closure rule applied, and the certificates
// of the constituents it rests on.
struct Certificate {
    std::string rule;
    std::vector<Certificate> premises;
};

struct CertificateResult {
    bool certified = false;
    std::optional<Certificate> certificate; // present iff certified
};

// Sound but incomplete: Certified means provably bistochastic by closure
// rules; Unknown never asserts the negative.
CertificateResult certify_bistochastic(const OperatorSpec& op);

OperatorSpec make_family_va(const DoublyStochasticMatrix& a);

// True iff the coordinate ordering of op(x) never contradicts the ordering
// of x on any sample (ties exempt both ways).
bool sorting_cone_invariance_check(const OperatorSpec& op, std::size_t samples,
                                   std::uint64_t seed);

} // namespace qbo
