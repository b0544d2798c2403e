#pragma once

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "qbo/simplex.hpp"

namespace qbo {

// Heredity coefficients p(i,j,k): symmetric in (i,j), nonnegative, and
// sum_k p(i,j,k) = 1 for every pair. Loading symmetrizes and renormalizes;
// violations beyond the load tolerances are rejected.
class QsoTensor {
public:
    static QsoTensor load(const std::vector<std::vector<std::vector<double>>>& p);
    static QsoTensor load_flat(std::size_t m, std::vector<double> p);
    static QsoTensor identity(std::size_t m);

    std::size_t dim() const { return m_; }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return p_[(i * m_ + j) * m_ + k];
    }
    const std::vector<double>& flat() const { return p_; }

    std::vector<double> apply_raw(const std::vector<double>& x) const;

    bool operator==(const QsoTensor&) const = default;

private:
    QsoTensor(std::size_t m, std::vector<double> p) : m_(m), p_(std::move(p)) {}
    std::size_t m_ = 0;
    std::vector<double> p_;
};

// Coordinate relocation: output k takes input perm(k). Stored 0-based; the
// wire format is 1-based.
class PermutationOperator {
public:
    static PermutationOperator load(std::vector<std::size_t> perm_zero_based);
    static PermutationOperator identity(std::size_t m);

    std::size_t dim() const { return perm_.size(); }
    const std::vector<std::size_t>& perm() const { return perm_; }
    bool is_identity() const;

    std::vector<double> apply_raw(const std::vector<double>& x) const;

    // this-after-other: result[k] = other[perm[k]].
    PermutationOperator after(const PermutationOperator& other) const;

    bool operator==(const PermutationOperator&) const = default;

private:
    explicit PermutationOperator(std::vector<std::size_t> perm) : perm_(std::move(perm)) {}
    std::vector<std::size_t> perm_;
};

class DoublyStochasticMatrix {
public:
    static DoublyStochasticMatrix load(const std::vector<std::vector<double>>& a);
    static DoublyStochasticMatrix uniform(std::size_t m);
    static DoublyStochasticMatrix from_permutation(const PermutationOperator& p);

    std::size_t dim() const { return m_; }
    double at(std::size_t row, std::size_t col) const { return a_[row * m_ + col]; }
    const std::vector<double>& flat() const { return a_; }
    std::vector<std::vector<double>> rows() const;

    std::vector<double> apply_raw(const std::vector<double>& x) const;

    bool operator==(const DoublyStochasticMatrix&) const = default;

private:
    DoublyStochasticMatrix(std::size_t m, std::vector<double> a) : m_(m), a_(std::move(a)) {}
    std::size_t m_ = 0;
    std::vector<double> a_;
};

struct MixTerm; // completed after OperatorSpec

class OperatorSpec {
public:
    enum class Kind {
        Tensor,
        Permutation,
        LinearDS,
        Mix,
        FamilyVA,
        FamilyUniform,
        Composed, // outer permutation applied after an inner operator
    };

    static OperatorSpec tensor(QsoTensor t);
    static OperatorSpec permutation(PermutationOperator p);
    static OperatorSpec linear_ds(DoublyStochasticMatrix a);
    static OperatorSpec family_va(DoublyStochasticMatrix a);
    static OperatorSpec family_uniform(std::size_t m);
    static OperatorSpec identity(std::size_t m);
    static OperatorSpec make_mix(std::vector<std::pair<double, OperatorSpec>> terms);
    static OperatorSpec composed(PermutationOperator outer, OperatorSpec inner);

    Kind kind() const;
    std::size_t dim() const;

    const QsoTensor& tensor_data() const;               // Kind::Tensor
    const PermutationOperator& permutation_data() const; // Kind::Permutation
    const DoublyStochasticMatrix& matrix_data() const;   // Kind::LinearDS, Kind::FamilyVA
    const std::vector<MixTerm>& mix_terms() const;       // Kind::Mix
    const PermutationOperator& outer_permutation() const; // Kind::Composed
    const OperatorSpec& inner() const;                    // Kind::Composed

    std::vector<double> apply_raw(const std::vector<double>& x) const;

private:
    struct Node;
    explicit OperatorSpec(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct MixTerm {
    double weight;
    OperatorSpec op;
};

SimplexPoint apply(const OperatorSpec& op, const SimplexPoint& x);

// Canonical symmetric tensor with the same action; cross-validation only,
// closed forms stay the fast path.
QsoTensor to_tensor(const OperatorSpec& op);

// Operator sending x to perm(op(x)). Tensor, permutation, linear and mix
// specs absorb the permutation into their data; the named families keep
// their closed form behind a Composed node.
OperatorSpec compose_with_permutation(const PermutationOperator& perm, const OperatorSpec& op);

OperatorSpec mix(const std::vector<OperatorSpec>& ops, const std::vector<double>& weights);

// The two coordinate-swap matrices whose equal-weight mix loses every
// 2-cycle its constituents have.
std::pair<OperatorSpec, OperatorSpec> fixture_counterexample_pair();

// Exact structural comparison (same kinds, same numbers); used by round-trip
// tests, not a semantic equivalence.
bool structurally_equal(const OperatorSpec& a, const OperatorSpec& b);

} // namespace qbo
