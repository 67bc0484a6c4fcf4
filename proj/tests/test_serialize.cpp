#include <doctest.h>

#include "birkhoff/serialize.hpp"

using namespace birkhoff;

TEST_CASE("relation set round trip") {
  for (int g = 0; g <= 2; ++g) {
    RelationSet rs = derive_relations(StratumSpec::with_window(g, 9));
    auto j = to_json(rs);
    CHECK(j["generators"].size() == static_cast<std::size_t>(2 * g + 1));
    RelationSet back = relation_set_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.generators() == rs.generators());
    CHECK(back.solved_order() == rs.solved_order());
    for (VarId v : rs.solved_order()) CHECK(*back.solution(v) == *rs.solution(v));
    CHECK(to_json(back) == j);
  }
  CHECK_THROWS_AS(relation_set_from_json(nlohmann::json::object()), ParseError);
}

TEST_CASE("hydrodynamic system round trip") {
  RelationSet rs1 = derive_relations(StratumSpec::with_window(1, 13));
  HydroSystem s = derive_dckdv(1, rs1, 1);
  auto j = to_json(s);
  CHECK(j["space"] == "x[3]");
  HydroSystem back = hydro_system_from_json(j);
  REQUIRE(back.fields == s.fields);
  for (std::size_t i = 0; i < s.rhs.size(); ++i) CHECK(back.rhs[i] == s.rhs[i]);
  CHECK(back.space_index == 3);
}

TEST_CASE("report and table documents") {
  Report r;
  r.name = "demo";
  r.checked = 2;
  r.fail("x = 0", {1, 2}, "x");
  auto j = to_json(r);
  CHECK(j["ok"] == false);
  CHECK(j["failures"][0]["indices"] == nlohmann::json::array({1, 2}));

  StratumSpec s = StratumSpec::with_window(0, 5);
  auto t = to_json(structure_constants(s, derive_relations(s)));
  CHECK(t["genus"] == 0);
  CHECK(!t["pairs"].empty());
}
