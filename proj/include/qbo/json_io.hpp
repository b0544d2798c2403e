#pragma once

#include <string>

#include <json.hpp>

#include "qbo/bistochastic.hpp"
#include "qbo/dynamics.hpp"
#include "qbo/operators.hpp"
#include "qbo/polytope.hpp"

namespace qbo {

// Tagged operator schema; "kind" selects the representation. Permutations
// are 1-indexed on the wire.
OperatorSpec operator_from_json(const nlohmann::json& j);
nlohmann::json operator_to_json(const OperatorSpec& op);

// Parse with line/column diagnostics on malformed text.
OperatorSpec parse_operator_text(const std::string& text);

PolytopeSpec polytope_from_json(const nlohmann::json& j);
nlohmann::json polytope_to_json(const PolytopeSpec& q);
PolytopeSpec parse_polytope_text(const std::string& text);

nlohmann::json certificate_to_json(const Certificate& c);
nlohmann::json falsify_report_to_json(const FalsifyReport& r);
nlohmann::json trajectory_verdict_to_json(const TrajectoryRecord& rec);
nlohmann::json regularity_verdict_to_json(const RegularityVerdict& v);

// Header row plus one row per recorded iterate; numbers are shortest
// round-trip decimal.
std::string trajectory_to_csv(const TrajectoryRecord& rec);

// Canonical text form: two-space indent, sorted keys, trailing newline.
std::string json_to_text(const nlohmann::json& j);

} // namespace qbo
