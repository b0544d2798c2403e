#include "qbo/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "qbo/errors.hpp"
#include "qbo/tolerances.hpp"

namespace qbo {

namespace {

void require_finite(const std::vector<double>& v, const char* what) {
    for (double c : v)
        if (!std::isfinite(c)) throw ValidationError(std::string(what) + ": non-finite entry");
}

double clamp_entry(double v, const char* what) {
    if (v < -defaults::kCoordinateClamp)
        throw ValidationError(std::string(what) + ": negative entry " + std::to_string(v));
    return v < 0.0 ? 0.0 : v;
}

// Scale a unit-sum slice exactly to 1, pushing the rounding residual into
// the largest entry. Assumes |sum - 1| was already checked.
void fix_unit_sum(double* begin, std::size_t n, std::size_t stride) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) sum += begin[k * stride];
    std::size_t largest = 0;
    for (std::size_t k = 0; k < n; ++k) {
        begin[k * stride] /= sum;
        if (begin[k * stride] > begin[largest * stride]) largest = k;
    }
    double after = 0.0;
    for (std::size_t k = 0; k < n; ++k) after += begin[k * stride];
    begin[largest * stride] += 1.0 - after;
}

} // namespace

QsoTensor QsoTensor::load(const std::vector<std::vector<std::vector<double>>>& p) {
    const std::size_t m = p.size();
    if (m == 0) throw ValidationError("tensor: empty");
    std::vector<double> flat(m * m * m);
    for (std::size_t i = 0; i < m; ++i) {
        if (p[i].size() != m) throw ValidationError("tensor: ragged shape");
        for (std::size_t j = 0; j < m; ++j) {
            if (p[i][j].size() != m) throw ValidationError("tensor: ragged shape");
            for (std::size_t k = 0; k < m; ++k) flat[(i * m + j) * m + k] = p[i][j][k];
        }
    }
    return load_flat(m, std::move(flat));
}

QsoTensor QsoTensor::load_flat(std::size_t m, std::vector<double> p) {
    if (m == 0) throw ValidationError("tensor: dimension must be positive");
    if (p.size() != m * m * m) throw ValidationError("tensor: entry count mismatch");
    require_finite(p, "tensor");
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k) {
                const double avg = 0.5 * (p[(i * m + j) * m + k] + p[(j * m + i) * m + k]);
                p[(i * m + j) * m + k] = avg;
                p[(j * m + i) * m + k] = avg;
            }
    for (double& v : p) v = clamp_entry(v, "tensor");
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < m; ++k) sum += p[(i * m + j) * m + k];
            if (std::abs(sum - 1.0) > defaults::kLoadSumTolerance)
                throw ValidationError("tensor: coefficient slice (" + std::to_string(i + 1) + "," +
                                      std::to_string(j + 1) + ") sums to " + std::to_string(sum));
            fix_unit_sum(&p[(i * m + j) * m], m, 1);
            if (i != j)
                for (std::size_t k = 0; k < m; ++k)
                    p[(j * m + i) * m + k] = p[(i * m + j) * m + k];
        }
    return QsoTensor(m, std::move(p));
}

QsoTensor QsoTensor::identity(std::size_t m) {
    if (m == 0) throw ValidationError("tensor: dimension must be positive");
    std::vector<double> p(m * m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            p[(i * m + j) * m + i] += 0.5;
            p[(i * m + j) * m + j] += 0.5;
        }
    return QsoTensor(m, std::move(p));
}

std::vector<double> QsoTensor::apply_raw(const std::vector<double>& x) const {
    if (x.size() != m_) throw DimensionMismatch("tensor apply: dimension mismatch");
    std::vector<double> y(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
        if (x[i] == 0.0) continue;
        for (std::size_t j = 0; j < m_; ++j) {
            const double w = x[i] * x[j];
            if (w == 0.0) continue;
            const double* row = &p_[(i * m_ + j) * m_];
            for (std::size_t k = 0; k < m_; ++k) y[k] += w * row[k];
        }
    }
    return y;
}

PermutationOperator PermutationOperator::load(std::vector<std::size_t> perm) {
    const std::size_t m = perm.size();
    if (m == 0) throw ValidationError("permutation: empty");
    std::vector<bool> seen(m, false);
    for (std::size_t v : perm) {
        if (v >= m) throw ValidationError("permutation: index out of range");
        if (seen[v]) throw ValidationError("permutation: repeated index");
        seen[v] = true;
    }
    return PermutationOperator(std::move(perm));
}

PermutationOperator PermutationOperator::identity(std::size_t m) {
    if (m == 0) throw ValidationError("permutation: dimension must be positive");
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    return PermutationOperator(std::move(perm));
}

bool PermutationOperator::is_identity() const {
    for (std::size_t k = 0; k < perm_.size(); ++k)
        if (perm_[k] != k) return false;
    return true;
}

std::vector<double> PermutationOperator::apply_raw(const std::vector<double>& x) const {
    if (x.size() != perm_.size()) throw DimensionMismatch("permutation apply: dimension mismatch");
    std::vector<double> y(perm_.size());
    for (std::size_t k = 0; k < perm_.size(); ++k) y[k] = x[perm_[k]];
    return y;
}

PermutationOperator PermutationOperator::after(const PermutationOperator& other) const {
    if (perm_.size() != other.perm_.size())
        throw DimensionMismatch("permutation composition: dimension mismatch");
    std::vector<std::size_t> combined(perm_.size());
    for (std::size_t k = 0; k < perm_.size(); ++k) combined[k] = other.perm_[perm_[k]];
    return PermutationOperator(std::move(combined));
}

DoublyStochasticMatrix DoublyStochasticMatrix::load(const std::vector<std::vector<double>>& a) {
    const std::size_t m = a.size();
    if (m == 0) throw ValidationError("doubly stochastic matrix: empty");
    std::vector<double> flat(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        if (a[i].size() != m) throw ValidationError("doubly stochastic matrix: not square");
        for (std::size_t j = 0; j < m; ++j) flat[i * m + j] = a[i][j];
    }
    require_finite(flat, "doubly stochastic matrix");
    for (double& v : flat) v = clamp_entry(v, "doubly stochastic matrix");
    for (std::size_t i = 0; i < m; ++i) {
        double row = 0.0, col = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            row += flat[i * m + j];
            col += flat[j * m + i];
        }
        if (std::abs(row - 1.0) > defaults::kLoadSumTolerance)
            throw ValidationError("doubly stochastic matrix: row " + std::to_string(i + 1) +
                                  " sums to " + std::to_string(row));
        if (std::abs(col - 1.0) > defaults::kLoadSumTolerance)
            throw ValidationError("doubly stochastic matrix: column " + std::to_string(i + 1) +
                                  " sums to " + std::to_string(col));
    }
    return DoublyStochasticMatrix(m, std::move(flat));
}

DoublyStochasticMatrix DoublyStochasticMatrix::uniform(std::size_t m) {
    if (m == 0) throw ValidationError("doubly stochastic matrix: dimension must be positive");
    return DoublyStochasticMatrix(m, std::vector<double>(m * m, 1.0 / static_cast<double>(m)));
}

DoublyStochasticMatrix DoublyStochasticMatrix::from_permutation(const PermutationOperator& p) {
    const std::size_t m = p.dim();
    std::vector<double> flat(m * m, 0.0);
    for (std::size_t k = 0; k < m; ++k) flat[k * m + p.perm()[k]] = 1.0;
    return DoublyStochasticMatrix(m, std::move(flat));
}

std::vector<std::vector<double>> DoublyStochasticMatrix::rows() const {
    std::vector<std::vector<double>> out(m_);
    for (std::size_t i = 0; i < m_; ++i)
        out[i].assign(a_.begin() + static_cast<std::ptrdiff_t>(i * m_),
                      a_.begin() + static_cast<std::ptrdiff_t>((i + 1) * m_));
    return out;
}

std::vector<double> DoublyStochasticMatrix::apply_raw(const std::vector<double>& x) const {
    if (x.size() != m_) throw DimensionMismatch("matrix apply: dimension mismatch");
    std::vector<double> y(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
        for (std::size_t j = 0; j < m_; ++j) y[i] += a_[i * m_ + j] * x[j];
    return y;
}

struct OperatorSpec::Node {
    Kind kind;
    std::size_t m = 0;
    std::optional<QsoTensor> tensor;
    std::optional<PermutationOperator> perm;
    std::optional<DoublyStochasticMatrix> matrix;
    std::vector<MixTerm> terms;
    std::optional<OperatorSpec> inner_op;
};

OperatorSpec OperatorSpec::tensor(QsoTensor t) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::Tensor;
    node->m = t.dim();
    node->tensor = std::move(t);
    return OperatorSpec(std::move(node));
}

OperatorSpec OperatorSpec::permutation(PermutationOperator p) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::Permutation;
    node->m = p.dim();
    node->perm = std::move(p);
    return OperatorSpec(std::move(node));
}

OperatorSpec OperatorSpec::linear_ds(DoublyStochasticMatrix a) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::LinearDS;
    node->m = a.dim();
    node->matrix = std::move(a);
    return OperatorSpec(std::move(node));
}

OperatorSpec OperatorSpec::family_va(DoublyStochasticMatrix a) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::FamilyVA;
    node->m = a.dim();
    node->matrix = std::move(a);
    return OperatorSpec(std::move(node));
}

OperatorSpec OperatorSpec::family_uniform(std::size_t m) {
    if (m == 0) throw ValidationError("family-uniform: dimension must be positive");
    auto node = std::make_shared<Node>();
    node->kind = Kind::FamilyUniform;
    node->m = m;
    return OperatorSpec(std::move(node));
}

OperatorSpec OperatorSpec::identity(std::size_t m) {
    return permutation(PermutationOperator::identity(m));
}

OperatorSpec OperatorSpec::make_mix(std::vector<std::pair<double, OperatorSpec>> terms) {
    if (terms.empty()) throw ValidationError("mix: no terms");
    const std::size_t m = terms.front().second.dim();
    double sum = 0.0;
    for (const auto& [w, op] : terms) {
        if (!(w > 0.0)) throw ValidationError("mix: weights must be strictly positive");
        if (op.dim() != m) throw DimensionMismatch("mix: constituent dimension mismatch");
        sum += w;
    }
    if (std::abs(sum - 1.0) > defaults::kLoadSumTolerance)
        throw ValidationError("mix: weights sum to " + std::to_string(sum));
    std::vector<double> weights;
    weights.reserve(terms.size());
    for (const auto& [w, op] : terms) weights.push_back(w);
    fix_unit_sum(weights.data(), weights.size(), 1);

    auto node = std::make_shared<Node>();
    node->kind = Kind::Mix;
    node->m = m;
    node->terms.reserve(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i)
        node->terms.push_back(MixTerm{weights[i], std::move(terms[i].second)});
    return OperatorSpec(std::move(node));
}

OperatorSpec OperatorSpec::composed(PermutationOperator outer, OperatorSpec inner) {
    if (outer.dim() != inner.dim())
        throw DimensionMismatch("composition: dimension mismatch");
    if (outer.is_identity()) return inner;
    switch (inner.kind()) {
        case Kind::Permutation:
            return permutation(outer.after(inner.permutation_data()));
        case Kind::LinearDS: {
            const auto all_rows = inner.matrix_data().rows();
            std::vector<std::vector<double>> rows(all_rows.size());
            for (std::size_t k = 0; k < rows.size(); ++k) rows[k] = all_rows[outer.perm()[k]];
            return linear_ds(DoublyStochasticMatrix::load(rows));
        }
        case Kind::Tensor: {
            const auto& t = inner.tensor_data();
            const std::size_t m = t.dim();
            std::vector<double> p(m * m * m);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j)
                    for (std::size_t k = 0; k < m; ++k)
                        p[(i * m + j) * m + k] = t.at(i, j, outer.perm()[k]);
            return tensor(QsoTensor::load_flat(m, std::move(p)));
        }
        case Kind::Mix: {
            std::vector<std::pair<double, OperatorSpec>> terms;
            terms.reserve(inner.mix_terms().size());
            for (const auto& term : inner.mix_terms())
                terms.emplace_back(term.weight, composed(outer, term.op));
            return make_mix(std::move(terms));
        }
        case Kind::Composed:
            return composed(outer.after(inner.outer_permutation()), inner.inner());
        case Kind::FamilyVA:
        case Kind::FamilyUniform:
            break; // no closed form for the composite; keep the wrapper
    }
    auto node = std::make_shared<Node>();
    node->kind = Kind::Composed;
    node->m = inner.dim();
    node->perm = std::move(outer);
    node->inner_op = std::move(inner);
    return OperatorSpec(std::move(node));
}

OperatorSpec::Kind OperatorSpec::kind() const { return node_->kind; }
std::size_t OperatorSpec::dim() const { return node_->m; }

const QsoTensor& OperatorSpec::tensor_data() const {
    if (!node_->tensor) throw std::logic_error("operator is not a tensor");
    return *node_->tensor;
}

const PermutationOperator& OperatorSpec::permutation_data() const {
    if (node_->kind != Kind::Permutation) throw std::logic_error("operator is not a permutation");
    return *node_->perm;
}

const DoublyStochasticMatrix& OperatorSpec::matrix_data() const {
    if (!node_->matrix) throw std::logic_error("operator has no matrix");
    return *node_->matrix;
}

const std::vector<MixTerm>& OperatorSpec::mix_terms() const {
    if (node_->kind != Kind::Mix) throw std::logic_error("operator is not a mix");
    return node_->terms;
}

const PermutationOperator& OperatorSpec::outer_permutation() const {
    if (node_->kind != Kind::Composed) throw std::logic_error("operator is not a composition");
    return *node_->perm;
}

const OperatorSpec& OperatorSpec::inner() const {
    if (node_->kind != Kind::Composed) throw std::logic_error("operator is not a composition");
    return *node_->inner_op;
}

std::vector<double> OperatorSpec::apply_raw(const std::vector<double>& x) const {
    if (x.size() != node_->m) throw DimensionMismatch("apply: dimension mismatch");
    switch (node_->kind) {
        case Kind::Tensor:
            return node_->tensor->apply_raw(x);
        case Kind::Permutation:
            return node_->perm->apply_raw(x);
        case Kind::LinearDS:
            return node_->matrix->apply_raw(x);
        case Kind::FamilyVA: {
            const std::size_t m = node_->m;
            const auto& a = *node_->matrix;
            std::vector<double> y(m);
            for (std::size_t k = 0; k < m; ++k) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m; ++i) acc += a.at(k, i) * x[i] * x[i];
                y[k] = acc + x[k] * (1.0 - x[k]);
            }
            return y;
        }
        case Kind::FamilyUniform: {
            const std::size_t m = node_->m;
            double s2 = 0.0;
            for (double c : x) s2 += c * c;
            const double base = s2 / static_cast<double>(m);
            std::vector<double> y(m);
            for (std::size_t k = 0; k < m; ++k) y[k] = base + x[k] * (1.0 - x[k]);
            return y;
        }
        case Kind::Mix: {
            std::vector<double> y(node_->m, 0.0);
            for (const auto& term : node_->terms) {
                const std::vector<double> v = term.op.apply_raw(x);
                for (std::size_t k = 0; k < y.size(); ++k) y[k] += term.weight * v[k];
            }
            return y;
        }
        case Kind::Composed: {
            const std::vector<double> v = node_->inner_op->apply_raw(x);
            return node_->perm->apply_raw(v);
        }
    }
    throw std::logic_error("apply: unreachable operator kind");
}

SimplexPoint apply(const OperatorSpec& op, const SimplexPoint& x) {
    return SimplexPoint::from_operator_output(op.apply_raw(x.coords()));
}

namespace {

QsoTensor linear_map_tensor(const DoublyStochasticMatrix& a) {
    const std::size_t m = a.dim();
    std::vector<double> p(m * m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                p[(i * m + j) * m + k] = 0.5 * (a.at(k, i) + a.at(k, j));
    return QsoTensor::load_flat(m, std::move(p));
}

QsoTensor family_va_tensor(const DoublyStochasticMatrix& a) {
    const std::size_t m = a.dim();
    std::vector<double> p(m * m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k) {
                double v = 0.0;
                if (i == j) {
                    v = a.at(k, i);
                } else {
                    if (i == k) v += 0.5;
                    if (j == k) v += 0.5;
                }
                p[(i * m + j) * m + k] = v;
            }
    return QsoTensor::load_flat(m, std::move(p));
}

} // namespace

QsoTensor to_tensor(const OperatorSpec& op) {
    switch (op.kind()) {
        case OperatorSpec::Kind::Tensor:
            return op.tensor_data();
        case OperatorSpec::Kind::Permutation:
            return linear_map_tensor(DoublyStochasticMatrix::from_permutation(op.permutation_data()));
        case OperatorSpec::Kind::LinearDS:
            return linear_map_tensor(op.matrix_data());
        case OperatorSpec::Kind::FamilyVA:
            return family_va_tensor(op.matrix_data());
        case OperatorSpec::Kind::FamilyUniform:
            return family_va_tensor(DoublyStochasticMatrix::uniform(op.dim()));
        case OperatorSpec::Kind::Mix: {
            const std::size_t m = op.dim();
            std::vector<double> p(m * m * m, 0.0);
            for (const auto& term : op.mix_terms()) {
                const QsoTensor t = to_tensor(term.op);
                for (std::size_t idx = 0; idx < p.size(); ++idx)
                    p[idx] += term.weight * t.flat()[idx];
            }
            return QsoTensor::load_flat(m, std::move(p));
        }
        case OperatorSpec::Kind::Composed: {
            const QsoTensor t = to_tensor(op.inner());
            const std::size_t m = t.dim();
            const auto& perm = op.outer_permutation().perm();
            std::vector<double> p(m * m * m);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j)
                    for (std::size_t k = 0; k < m; ++k)
                        p[(i * m + j) * m + k] = t.at(i, j, perm[k]);
            return QsoTensor::load_flat(m, std::move(p));
        }
    }
    throw std::logic_error("to_tensor: unreachable operator kind");
}

OperatorSpec compose_with_permutation(const PermutationOperator& perm, const OperatorSpec& op) {
    return OperatorSpec::composed(perm, op);
}

OperatorSpec mix(const std::vector<OperatorSpec>& ops, const std::vector<double>& weights) {
    if (ops.size() != weights.size())
        throw ValidationError("mix: operator and weight counts differ");
    std::vector<std::pair<double, OperatorSpec>> terms;
    terms.reserve(ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i) terms.emplace_back(weights[i], ops[i]);
    return OperatorSpec::make_mix(std::move(terms));
}

std::pair<OperatorSpec, OperatorSpec> fixture_counterexample_pair() {
    const OperatorSpec p1 = OperatorSpec::linear_ds(DoublyStochasticMatrix::load({
        {0.0, 1.0, 0.0},
        {1.0, 0.0, 0.0},
        {0.0, 0.0, 1.0},
    }));
    const OperatorSpec p2 = OperatorSpec::linear_ds(DoublyStochasticMatrix::load({
        {1.0, 0.0, 0.0},
        {0.0, 0.0, 1.0},
        {0.0, 1.0, 0.0},
    }));
    return {p1, p2};
}

bool structurally_equal(const OperatorSpec& a, const OperatorSpec& b) {
    if (a.kind() != b.kind() || a.dim() != b.dim()) return false;
    switch (a.kind()) {
        case OperatorSpec::Kind::Tensor:
            return a.tensor_data() == b.tensor_data();
        case OperatorSpec::Kind::Permutation:
            return a.permutation_data() == b.permutation_data();
        case OperatorSpec::Kind::LinearDS:
        case OperatorSpec::Kind::FamilyVA:
            return a.matrix_data() == b.matrix_data();
        case OperatorSpec::Kind::FamilyUniform:
            return true;
        case OperatorSpec::Kind::Mix: {
            const auto& ta = a.mix_terms();
            const auto& tb = b.mix_terms();
            if (ta.size() != tb.size()) return false;
            for (std::size_t i = 0; i < ta.size(); ++i)
                if (ta[i].weight != tb[i].weight || !structurally_equal(ta[i].op, tb[i].op))
                    return false;
            return true;
        }
        case OperatorSpec::Kind::Composed:
            return a.outer_permutation() == b.outer_permutation() &&
                   structurally_equal(a.inner(), b.inner());
    }
    return false;
}

} // namespace qbo
