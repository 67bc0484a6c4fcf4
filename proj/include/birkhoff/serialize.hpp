#pragma once

#include <json.hpp>

#include "birkhoff/flows.hpp"
#include "birkhoff/relation_set.hpp"
#include "birkhoff/report.hpp"
#include "birkhoff/strata.hpp"

namespace birkhoff {

// Polynomials travel as canonical strings, so documents diff cleanly.
nlohmann::json to_json(const RelationSet& rs);
RelationSet relation_set_from_json(const nlohmann::json& j);  // ParseError

nlohmann::json to_json(const StructureConstantTable& t);
nlohmann::json to_json(const HydroSystem& s);
HydroSystem hydro_system_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DiagonalSystem& s);
nlohmann::json to_json(const Report& r);

}  // namespace birkhoff
