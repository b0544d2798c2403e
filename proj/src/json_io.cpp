#include "qbo/json_io.hpp"

#include <charconv>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qbo/errors.hpp"

namespace qbo {

namespace {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

[[noreturn]] void fail(const std::string& what) { throw ValidationError("operator json: " + what); }

const json& field(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) fail(std::string("missing field \"") + key + "\"");
    return *it;
}

std::size_t positive_dimension(const json& j) {
    if (!j.is_number_unsigned() || j.get<std::size_t>() == 0)
        fail("\"m\" must be a positive integer");
    return j.get<std::size_t>();
}

std::vector<std::vector<double>> matrix_field(const json& j, const char* key) {
    const json& a = field(j, key);
    if (!a.is_array() || a.empty()) fail(std::string("\"") + key + "\" must be a nonempty array");
    std::vector<std::vector<double>> rows;
    rows.reserve(a.size());
    for (const auto& row : a) {
        if (!row.is_array()) fail(std::string("\"") + key + "\" rows must be arrays");
        rows.push_back(row.get<std::vector<double>>());
    }
    return rows;
}

PermutationOperator permutation_field(const json& j, const char* key) {
    const json& p = field(j, key);
    if (!p.is_array() || p.empty()) fail(std::string("\"") + key + "\" must be a nonempty array");
    std::vector<std::size_t> perm;
    perm.reserve(p.size());
    for (const auto& v : p) {
        if (!v.is_number_unsigned() || v.get<std::size_t>() == 0)
            fail("permutation entries are 1-based positive integers");
        perm.push_back(v.get<std::size_t>() - 1);
    }
    return PermutationOperator::load(std::move(perm));
}

json permutation_to_wire(const PermutationOperator& p) {
    json arr = json::array();
    for (std::size_t v : p.perm()) arr.push_back(v + 1);
    return arr;
}

json matrix_to_wire(const DoublyStochasticMatrix& a) {
    json arr = json::array();
    for (const auto& row : a.rows()) arr.push_back(row);
    return arr;
}

// Line/column of a byte offset, 1-based, for parse diagnostics.
std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

json parse_text(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ValidationError(std::string(what) + ": parse error at line " + std::to_string(line) +
                              ", column " + std::to_string(col));
    }
}

} // namespace

OperatorSpec operator_from_json(const json& j) {
    if (!j.is_object()) fail("operator must be an object");
    const json& kind_field = field(j, "kind");
    if (!kind_field.is_string()) fail("\"kind\" must be a string");
    const std::string kind = kind_field.get<std::string>();
    try {
        if (kind == "tensor") {
            const std::size_t m = positive_dimension(field(j, "m"));
            const json& p = field(j, "p");
            if (!p.is_array()) fail("\"p\" must be an array");
            auto cube = p.get<std::vector<std::vector<std::vector<double>>>>();
            if (cube.size() != m) fail("\"m\" disagrees with the shape of \"p\"");
            return OperatorSpec::tensor(QsoTensor::load(cube));
        }
        if (kind == "permutation")
            return OperatorSpec::permutation(permutation_field(j, "perm"));
        if (kind == "linear-ds")
            return OperatorSpec::linear_ds(DoublyStochasticMatrix::load(matrix_field(j, "a")));
        if (kind == "family-va")
            return OperatorSpec::family_va(DoublyStochasticMatrix::load(matrix_field(j, "a")));
        if (kind == "family-uniform")
            return OperatorSpec::family_uniform(positive_dimension(field(j, "m")));
        if (kind == "mix") {
            const json& terms = field(j, "terms");
            if (!terms.is_array() || terms.empty()) fail("\"terms\" must be a nonempty array");
            std::vector<std::pair<double, OperatorSpec>> parsed;
            parsed.reserve(terms.size());
            for (const auto& term : terms) {
                const json& w = field(term, "weight");
                if (!w.is_number()) fail("term \"weight\" must be a number");
                parsed.emplace_back(w.get<double>(), operator_from_json(field(term, "op")));
            }
            return OperatorSpec::make_mix(std::move(parsed));
        }
        if (kind == "composed")
            return OperatorSpec::composed(permutation_field(j, "perm"),
                                          operator_from_json(field(j, "op")));
    } catch (const json::exception& e) {
        fail(e.what());
    }
    fail("unknown kind \"" + kind + "\"");
}

json operator_to_json(const OperatorSpec& op) {
    json j;
    switch (op.kind()) {
        case OperatorSpec::Kind::Tensor: {
            const QsoTensor& t = op.tensor_data();
            const std::size_t m = t.dim();
            json cube = json::array();
            for (std::size_t i = 0; i < m; ++i) {
                json plane = json::array();
                for (std::size_t jj = 0; jj < m; ++jj) {
                    json row = json::array();
                    for (std::size_t k = 0; k < m; ++k) row.push_back(t.at(i, jj, k));
                    plane.push_back(std::move(row));
                }
                cube.push_back(std::move(plane));
            }
            j["kind"] = "tensor";
            j["m"] = m;
            j["p"] = std::move(cube);
            return j;
        }
        case OperatorSpec::Kind::Permutation:
            j["kind"] = "permutation";
            j["perm"] = permutation_to_wire(op.permutation_data());
            return j;
        case OperatorSpec::Kind::LinearDS:
            j["kind"] = "linear-ds";
            j["a"] = matrix_to_wire(op.matrix_data());
            return j;
        case OperatorSpec::Kind::FamilyVA:
            j["kind"] = "family-va";
            j["a"] = matrix_to_wire(op.matrix_data());
            return j;
        case OperatorSpec::Kind::FamilyUniform:
            j["kind"] = "family-uniform";
            j["m"] = op.dim();
            return j;
        case OperatorSpec::Kind::Mix: {
            json terms = json::array();
            for (const auto& term : op.mix_terms()) {
                json t;
                t["weight"] = term.weight;
                t["op"] = operator_to_json(term.op);
                terms.push_back(std::move(t));
            }
            j["kind"] = "mix";
            j["terms"] = std::move(terms);
            return j;
        }
        case OperatorSpec::Kind::Composed:
            j["kind"] = "composed";
            j["perm"] = permutation_to_wire(op.outer_permutation());
            j["op"] = operator_to_json(op.inner());
            return j;
    }
    throw std::logic_error("operator_to_json: unreachable kind");
}

OperatorSpec parse_operator_text(const std::string& text) {
    return operator_from_json(parse_text(text, "operator"));
}

PolytopeSpec polytope_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("polytope json: must be an object");
    const auto it = j.find("generators");
    if (it == j.end()) throw ValidationError("polytope json: missing field \"generators\"");
    std::vector<std::vector<double>> gens;
    try {
        gens = it->get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("polytope json: ") + e.what());
    }
    const auto flag = j.find("irredundant");
    if (flag == j.end()) return PolytopeSpec::from_generators(std::move(gens));
    if (!flag->is_boolean()) throw ValidationError("polytope json: \"irredundant\" must be boolean");
    return PolytopeSpec::from_generators_claimed(std::move(gens), flag->get<bool>());
}

json polytope_to_json(const PolytopeSpec& q) {
    json j;
    j["generators"] = q.generators();
    j["irredundant"] = q.irredundant();
    return j;
}

PolytopeSpec parse_polytope_text(const std::string& text) {
    return polytope_from_json(parse_text(text, "polytope"));
}

json certificate_to_json(const Certificate& c) {
    json j;
    j["rule"] = c.rule;
    json premises = json::array();
    for (const auto& p : c.premises) premises.push_back(certificate_to_json(p));
    j["premises"] = std::move(premises);
    return j;
}

json falsify_report_to_json(const FalsifyReport& r) {
    json j;
    j["verdict"] =
        r.verdict == FalsifyReport::Verdict::CounterexampleFound ? "counterexample" : "none-found";
    j["samples"] = r.samples_used;
    j["seed"] = r.seed;
    if (r.x) j["x"] = r.x->coords();
    if (r.vx) j["vx"] = r.vx->coords();
    if (r.violating_prefix) j["violating_prefix"] = *r.violating_prefix;
    return j;
}

json trajectory_verdict_to_json(const TrajectoryRecord& rec) {
    json j;
    switch (rec.outcome) {
        case TrajectoryRecord::Outcome::Converged:
            j["verdict"] = "converged";
            j["limit"] = rec.limit->coords();
            break;
        case TrajectoryRecord::Outcome::Cycle:
            j["verdict"] = "cycle";
            j["period"] = rec.prime_period;
            break;
        case TrajectoryRecord::Outcome::BudgetExhausted:
            j["verdict"] = "budget";
            break;
    }
    j["steps"] = rec.steps_taken;
    return j;
}

json regularity_verdict_to_json(const RegularityVerdict& v) {
    json j;
    switch (v.classification) {
        case RegularityVerdict::Classification::StrictlyRegularEvidence:
            j["verdict"] = "strictly-regular-evidence";
            break;
        case RegularityVerdict::Classification::RegularEvidence:
            j["verdict"] = "regular-evidence";
            break;
        case RegularityVerdict::Classification::PeriodicOrbitFound:
            j["verdict"] = "periodic-orbit-found";
            break;
        case RegularityVerdict::Classification::Inconclusive:
            j["verdict"] = "inconclusive";
            break;
    }
    j["trials"] = v.trials;
    j["max_period_probed"] = v.max_period_probed;
    j["tolerances"] = {
        {"convergence", v.tolerances.convergence},
        {"fixed_point", v.tolerances.fixed_point},
        {"cycle", v.tolerances.cycle},
        {"cluster", v.tolerances.cluster},
    };
    if (v.witness) {
        json orbit = json::array();
        for (const auto& pt : v.witness->orbit) orbit.push_back(pt.coords());
        j["witness"] = {{"period", v.witness->prime_period}, {"orbit", std::move(orbit)}};
    }
    return j;
}

std::string trajectory_to_csv(const TrajectoryRecord& rec) {
    std::string out = "step";
    const std::size_t m = rec.start.dim();
    for (std::size_t k = 1; k <= m; ++k) out += ",x_" + std::to_string(k);
    out += "\n";
    for (const auto& [step, point] : rec.iterates) {
        out += std::to_string(step);
        for (std::size_t k = 0; k < m; ++k) {
            out += ',';
            out += format_double(point[k]);
        }
        out += "\n";
    }
    return out;
}

std::string json_to_text(const json& j) { return j.dump(2) + "\n"; }

} // namespace qbo
