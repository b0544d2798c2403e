#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qbo/bistochastic.hpp"
#include "qbo/dynamics.hpp"
#include "qbo/json_io.hpp"
#include "qbo/operators.hpp"
#include "qbo/polytope.hpp"
#include "qbo/rng.hpp"
#include "qbo/sampling.hpp"
#include "qbo/simplex.hpp"

namespace py = pybind11;

namespace {

py::object json_to_py(const nlohmann::json& j) {
    using nlohmann::json;
    switch (j.type()) {
        case json::value_t::object: {
            py::dict d;
            for (const auto& [k, v] : j.items()) d[py::str(k)] = json_to_py(v);
            return d;
        }
        case json::value_t::array: {
            py::list l;
            for (const auto& v : j) l.append(json_to_py(v));
            return l;
        }
        case json::value_t::string:
            return py::str(j.get<std::string>());
        case json::value_t::boolean:
            return py::bool_(j.get<bool>());
        case json::value_t::number_integer:
            return py::int_(j.get<long long>());
        case json::value_t::number_unsigned:
            return py::int_(j.get<unsigned long long>());
        case json::value_t::number_float:
            return py::float_(j.get<double>());
        default:
            return py::none();
    }
}

std::vector<std::vector<double>> points_to_lists(const std::vector<qbo::SimplexPoint>& pts) {
    std::vector<std::vector<double>> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(p.coords());
    return out;
}

qbo::PolytopeSpec polytope_of(const std::vector<std::vector<double>>& generators) {
    return qbo::PolytopeSpec::from_generators(generators);
}

} // namespace

PYBIND11_MODULE(qbo, m) {
    m.doc() = "Quadratic bistochastic operators on the standard simplex";

    py::class_<qbo::OperatorSpec>(m, "Operator")
        .def_property_readonly("dim", &qbo::OperatorSpec::dim)
        .def("__repr__", [](const qbo::OperatorSpec& op) {
            return "<Operator " + qbo::operator_to_json(op)["kind"].get<std::string>() + " m=" +
                   std::to_string(op.dim()) + ">";
        });

    m.def("parse_operator", [](const std::string& text) { return qbo::parse_operator_text(text); },
          py::arg("text"), "Parse an operator from its JSON text form");
    m.def("operator_json", [](const qbo::OperatorSpec& op) {
        return qbo::json_to_text(qbo::operator_to_json(op));
    });

    m.def("tensor", [](const std::vector<std::vector<std::vector<double>>>& p) {
        return qbo::OperatorSpec::tensor(qbo::QsoTensor::load(p));
    });
    m.def("permutation", [](const std::vector<std::size_t>& perm) {
        return qbo::OperatorSpec::permutation(qbo::PermutationOperator::load(perm));
    }, py::arg("perm"), "Coordinate permutation; entries are 0-based here, unlike the JSON wire");
    m.def("linear_ds", [](const std::vector<std::vector<double>>& a) {
        return qbo::OperatorSpec::linear_ds(qbo::DoublyStochasticMatrix::load(a));
    });
    m.def("family_va", [](const std::vector<std::vector<double>>& a) {
        return qbo::make_family_va(qbo::DoublyStochasticMatrix::load(a));
    });
    m.def("family_uniform", &qbo::OperatorSpec::family_uniform, py::arg("m"));
    m.def("identity", &qbo::OperatorSpec::identity, py::arg("m"));
    m.def("mix", [](const std::vector<qbo::OperatorSpec>& ops, const std::vector<double>& w) {
        return qbo::mix(ops, w);
    });
    m.def("counterexample_pair", &qbo::fixture_counterexample_pair);
    m.def("compose_with_permutation",
          [](const std::vector<std::size_t>& perm, const qbo::OperatorSpec& op) {
              return qbo::compose_with_permutation(qbo::PermutationOperator::load(perm), op);
          });
    m.def("to_tensor", [](const qbo::OperatorSpec& op) {
        const qbo::QsoTensor t = qbo::to_tensor(op);
        const std::size_t n = t.dim();
        std::vector<std::vector<std::vector<double>>> cube(
            n, std::vector<std::vector<double>>(n, std::vector<double>(n)));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k) cube[i][j][k] = t.at(i, j, k);
        return cube;
    });

    m.def("apply", [](const qbo::OperatorSpec& op, const std::vector<double>& x) {
        return qbo::apply(op, qbo::SimplexPoint::load(x)).coords();
    });
    m.def("barycenter", [](std::size_t n) { return qbo::SimplexPoint::barycenter(n).coords(); });
    m.def("l1_distance", [](const std::vector<double>& x, const std::vector<double>& y) {
        return qbo::l1_distance(qbo::SimplexPoint::load(x), qbo::SimplexPoint::load(y));
    });
    m.def("majorizes", [](const std::vector<double>& y, const std::vector<double>& x) {
        return qbo::majorizes(qbo::SimplexPoint::load(y), qbo::SimplexPoint::load(x));
    }, py::arg("y"), py::arg("x"), "True iff y majorizes x");
    m.def("in_permutation_polytope", [](const std::vector<double>& x, const std::vector<double>& y) {
        return qbo::in_permutation_polytope(qbo::SimplexPoint::load(x), qbo::SimplexPoint::load(y));
    });

    m.def("certify", [](const qbo::OperatorSpec& op) {
        const qbo::CertificateResult r = qbo::certify_bistochastic(op);
        py::dict d;
        d["certified"] = r.certified;
        if (r.certified) d["certificate"] = json_to_py(qbo::certificate_to_json(*r.certificate));
        return d;
    });
    m.def("falsify", [](const qbo::OperatorSpec& op, std::size_t budget, std::uint64_t seed) {
        return json_to_py(qbo::falsify_report_to_json(qbo::falsify_bistochastic(op, budget, seed)));
    }, py::arg("op"), py::arg("budget") = 10000, py::arg("seed") = 0);
    m.def("sorting_cone_invariance_check", &qbo::sorting_cone_invariance_check, py::arg("op"),
          py::arg("samples") = 1000, py::arg("seed") = 0);

    m.def("iterate", [](const qbo::OperatorSpec& op, const std::vector<double>& x0,
                        std::size_t max_steps) {
        const qbo::TrajectoryRecord rec =
            qbo::iterate(op, qbo::SimplexPoint::load(x0), max_steps);
        py::dict d = json_to_py(qbo::trajectory_verdict_to_json(rec)).cast<py::dict>();
        if (rec.outcome == qbo::TrajectoryRecord::Outcome::Cycle)
            d["orbit"] = points_to_lists(rec.orbit);
        return d;
    }, py::arg("op"), py::arg("x0"), py::arg("max_steps") = 10000);
    m.def("find_fixed_points", [](const qbo::OperatorSpec& op, std::size_t trials,
                                  std::uint64_t seed) {
        return points_to_lists(qbo::find_fixed_points(op, trials, seed));
    }, py::arg("op"), py::arg("trials") = 32, py::arg("seed") = 0);
    m.def("periodic_points_probe", [](const qbo::OperatorSpec& op, std::size_t p,
                                      std::size_t trials, std::uint64_t seed) {
        std::vector<std::vector<std::vector<double>>> out;
        for (const auto& orbit : qbo::periodic_points_probe(op, p, trials, seed))
            out.push_back(points_to_lists(orbit.orbit));
        return out;
    }, py::arg("op"), py::arg("p"), py::arg("trials") = 32, py::arg("seed") = 0);
    m.def("classify", [](const qbo::OperatorSpec& op, std::size_t trials, std::size_t max_steps,
                         std::size_t max_period, std::uint64_t seed) {
        return json_to_py(qbo::regularity_verdict_to_json(
            qbo::classify_regularity(op, trials, max_steps, max_period, seed)));
    }, py::arg("op"), py::arg("trials") = 32, py::arg("max_steps") = 10000,
       py::arg("max_period") = 8, py::arg("seed") = 0);
    m.def("check_mix_fix_identity", [](const std::vector<qbo::OperatorSpec>& ops,
                                       const std::vector<double>& weights, std::size_t trials,
                                       std::uint64_t seed) {
        const qbo::IdentityReport r = qbo::check_mix_fix_identity(ops, weights, trials, seed);
        py::dict d;
        d["holds"] = r.holds;
        d["mix_fixed_count"] = r.mix_fixed_count;
        d["common_fixed_count"] = r.common_fixed_count;
        if (!r.detail.empty()) d["detail"] = r.detail;
        return d;
    }, py::arg("ops"), py::arg("weights"), py::arg("trials") = 32, py::arg("seed") = 0);

    m.def("check_irredundant", [](const std::vector<std::vector<double>>& gens) {
        return qbo::check_irredundant(gens);
    });
    m.def("ri_membership", [](const std::vector<std::vector<double>>& gens,
                              const std::vector<double>& x) {
        return qbo::ri_membership(polytope_of(gens), x);
    });
    m.def("ri_sample", [](const std::vector<std::vector<double>>& gens, std::size_t count,
                          std::uint64_t seed) {
        return qbo::ri_sample(polytope_of(gens), count, seed);
    }, py::arg("generators"), py::arg("count") = 1, py::arg("seed") = 0);
    m.def("interior_mix", [](const std::vector<qbo::OperatorSpec>& pool, std::uint64_t seed) {
        return qbo::interior_mix(pool, seed);
    }, py::arg("pool"), py::arg("seed") = 0);
    m.def("all_permutation_operators", &qbo::all_permutation_operators, py::arg("m"));
}
