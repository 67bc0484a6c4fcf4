#include "birkhoff/serialize.hpp"

namespace birkhoff {

using nlohmann::json;

json to_json(const RelationSet& rs) {
  json j;
  j["generators"] = json::array();
  for (VarId g : rs.generators()) j["generators"].push_back(var_name(g));
  j["solved"] = json::array();
  for (VarId v : rs.solved_order()) j["solved"].push_back({{"symbol", var_name(v)}, {"value", rs.solution(v)->to_string()}});
  j["residuals"] = json::array();
  for (const auto& r : rs.residual_relations()) j["residuals"].push_back(r.to_string());
  return j;
}

RelationSet relation_set_from_json(const json& j) {
  RelationSet rs;
  try {
    for (const auto& g : j.at("generators")) rs.add_generator(var_id(g.get<std::string>()));
    for (const auto& s : j.at("solved"))
      rs.add_solution(var_id(s.at("symbol").get<std::string>()), MultiPoly::parse(s.at("value").get<std::string>()));
    if (j.contains("residuals"))
      for (const auto& r : j.at("residuals")) rs.add_residual(MultiPoly::parse(r.get<std::string>()));
  } catch (const json::exception& e) {
    throw ParseError(std::string("relation set document: ") + e.what());
  }
  return rs;
}

json to_json(const StructureConstantTable& t) {
  json j{{"genus", t.genus()}, {"window", t.window()}, {"pairs", json::array()}};
  for (const auto& [jk, exp] : t.pairs()) {
    json e{{"j", jk.first}, {"k", jk.second}, {"C", json::object()}};
    for (const auto& [l, c] : exp) e["C"][std::to_string(l)] = c.to_string();
    j["pairs"].push_back(std::move(e));
  }
  return j;
}

json to_json(const HydroSystem& s) {
  json j{{"name", s.name}, {"time", s.time_label}, {"space", "x[" + std::to_string(s.space_index) + "]"}};
  j["fields"] = json::array();
  j["rhs"] = json::array();
  for (std::size_t i = 0; i < s.fields.size(); ++i) {
    j["fields"].push_back(var_name(s.fields[i]));
    j["rhs"].push_back(s.rhs[i].to_string());
  }
  return j;
}

HydroSystem hydro_system_from_json(const json& j) {
  HydroSystem s;
  try {
    s.name = j.at("name").get<std::string>();
    s.time_label = j.at("time").get<std::string>();
    const std::string space = j.at("space").get<std::string>();
    if (space.size() < 4 || space.rfind("x[", 0) != 0 || space.back() != ']') throw ParseError("space '" + space + "'");
    s.space_index = std::stoi(space.substr(2, space.size() - 3));
    for (const auto& f : j.at("fields")) s.fields.push_back(var_id(f.get<std::string>()));
    for (const auto& r : j.at("rhs")) s.rhs.push_back(MultiPoly::parse(r.get<std::string>()));
  } catch (const json::exception& e) {
    throw ParseError(std::string("hydrodynamic system document: ") + e.what());
  }
  if (s.fields.size() != s.rhs.size()) throw ParseError("fields and rhs differ in length");
  return s;
}

json to_json(const DiagonalSystem& s) {
  json j{{"name", s.name}, {"time", s.time_label}, {"invariants", json::array()}, {"speeds", json::array()}};
  for (std::size_t i = 0; i < s.invariants.size(); ++i) {
    j["invariants"].push_back(var_name(s.invariants[i]));
    j["speeds"].push_back(s.speeds[i].to_string());
  }
  return j;
}

json to_json(const Report& r) {
  json j{{"name", r.name}, {"checked", r.checked}, {"ok", r.ok()}, {"failures", json::array()}, {"notes", r.notes}};
  for (const auto& f : r.failures)
    j["failures"].push_back(
        {{"identity", f.identity}, {"indices", f.indices}, {"residual", f.residual}, {"max_abs_residual", f.max_abs_residual}});
  return j;
}

}  // namespace birkhoff
