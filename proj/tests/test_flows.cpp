#include <random>

#include "birkhoff/errors.hpp"
#include "birkhoff/flows.hpp"
#include "birkhoff/strata.hpp"
#include "doctest.h"
#include "golden_flows.hpp"

using namespace birkhoff;

namespace {

MultiPoly P(const std::string& s) { return MultiPoly::parse(s); }

const RelationSet& relations(int g) {
  static std::map<int, RelationSet> cache;
  auto it = cache.find(g);
  if (it == cache.end()) it = cache.emplace(g, derive_relations(StratumSpec::with_window(g, 13))).first;
  return it->second;
}

void check_printed(const HydroSystem& s, const golden::PrintedFlow& printed) {
  REQUIRE(s.fields.size() == printed.lines.size());
  for (const auto& line : printed.lines) {
    CAPTURE(printed.label);
    CAPTURE(line.field);
    MultiPoly diff = s.rhs_of(line.field) - P(line.rhs);
    CHECK_MESSAGE(diff.is_zero(), diff.to_string());
  }
}

}  // namespace

TEST_CASE("BH hierarchy coefficients") {
  CHECK(bh_coefficient(1) == Rational(1));
  CHECK(bh_coefficient(2) == Rational(-3));
  CHECK(bh_coefficient(3) == Rational(15, 2));
  auto hier = derive_bh_hierarchy(relations(0), 6);
  for (int k = 1; k <= 6; ++k) {
    // oracle: d/dx1 of H[2k-1][1] = c'_k H11^k, c'_k = c_k / k
    MultiPoly want = MultiPoly(bh_coefficient(k)) * P("H[1][1]").pow(k - 1) * P("dH[1][1]/dx[1]");
    CHECK(hier[k - 1].rhs[0] == want);
    CHECK(is_hydrodynamic(hier[k - 1]));
  }
  CHECK(hier[1].rhs[0] == P("-3*H[1][1]*dH[1][1]/dx[1]"));
}

TEST_CASE("BH flows commute") {
  auto hier = derive_bh_hierarchy(relations(0), 4);
  CHECK(commutativity_check(hier[1], hier[1]).ok());
  CHECK(commutativity_check(hier[1], hier[2]).ok());
  CHECK(commutativity_check(hier[2], hier[3]).ok());
}

TEST_CASE("curve map inverts") {
  for (int g = 1; g <= 3; ++g) {
    auto fwd = curve_in_generators(g);
    auto inv = generators_in_curve(g);
    for (const auto& [u, p] : fwd) CHECK(p.substitute(inv) == MultiPoly::var(u));
    for (const auto& [h, p] : inv) CHECK(p.substitute(fwd) == MultiPoly::var(h));
  }
}

TEST_CASE("genus one u-form flows as printed") {
  HydroSystem x5 = derive_dckdv(1, relations(1), 1);
  HydroSystem x7 = derive_dckdv(1, relations(1), 2);
  check_printed(x5, golden::dckdv_g1_x5());
  check_printed(x7, golden::dckdv_g1_x7());
  CHECK(is_hydrodynamic(x5));
  CHECK(is_hydrodynamic(x7));
  CHECK(x5.rhs_of("u[0]") == P("-1/2*du[0]/dx[3]*u[2] - du[2]/dx[3]*u[0]"));
}

TEST_CASE("genus one flows commute") {
  HydroSystem x5 = derive_dckdv(1, relations(1), 1);
  HydroSystem x7 = derive_dckdv(1, relations(1), 2);
  CHECK(commutativity_check(x5, x5).ok());
  Report r = commutativity_check(x5, x7);
  CHECK(r.ok());
  CHECK(r.checked == 3);
  // the generator forms commute as well, including the x9 flow
  const RelationSet& rs = relations(1);
  CHECK(commutativity_check(generator_flow(1, rs, 5), generator_flow(1, rs, 9)).ok());
}

TEST_CASE("commutativity detects a broken flow") {
  HydroSystem x5 = derive_dckdv(1, relations(1), 1);
  HydroSystem x7 = derive_dckdv(1, relations(1), 2);
  x7.rhs[0] += P("u[2]*du[2]/dx[3]");
  CHECK_FALSE(commutativity_check(x5, x7).ok());
}

TEST_CASE("genus two flows") {
  const RelationSet& rs = relations(2);
  HydroSystem x7 = derive_dckdv(2, rs, 1);
  check_printed(x7, golden::dckdv_g2_x7());
  auto flux = conservation_fluxes(2, rs, 7);
  auto printed = golden::fluxes_g2_x7();
  for (std::size_t i = 0; i < flux.size(); ++i) {
    CAPTURE(i);
    CHECK(flux[i] == P(printed.lines[i].rhs));
  }
  CHECK(flux[0] == P("H[5][-1] - H[5][-3]^2"));
  HydroSystem x9 = derive_dckdv(2, rs, 2);
  CHECK(commutativity_check(x7, x9).ok());
  CHECK(is_hydrodynamic(x9));
}

TEST_CASE("moduli flows") {
  const RelationSet& rs = relations(1);
  check_printed(moduli_flow_g1(rs, 5), golden::moduli_x5());
  check_printed(moduli_flow_g1(rs, 7), golden::moduli_x7());
  check_printed(moduli_flow_S_g1(rs, 5), golden::moduli_S_x5());
  check_printed(moduli_flow_S_g1(rs, 7), golden::moduli_S_x7());
  CHECK(discriminant_flow_g1(rs, 5) == P(golden::discriminant_x5()));

  // chain rule oracle: d/dx5 g2(u) along the u-form flow
  HydroSystem u = derive_dckdv(1, rs, 1);
  MultiPoly g2u = P("u[1] - 1/3*u[2]^2");
  MultiPoly dg2 = g2u.derivative(var_id("u[1]")) * u.rhs_of("u[1]") + g2u.derivative(var_id("u[2]")) * u.rhs_of("u[2]");
  std::map<VarId, MultiPoly> to_u{{var_id("g2"), g2u}, {var_id("g3"), P("u[0] + 2/27*u[2]^3 - 1/3*u[1]*u[2]")}};
  MultiPoly printed_in_u = substitute_fields(P(golden::moduli_x5().lines[0].rhs), to_u, u.fields, 3);
  CHECK(printed_in_u == dg2);
}

TEST_CASE("S-form x7 g2 line against the u[2]-form line") {
  // Printed u[2]-form line pushed through u[2] = 2 S_x, u[2]_x = 2 S_xx.
  std::map<VarId, MultiPoly> sub{{var_id("u[2]"), P("2*dS/dx[3]")}, {var_id("du[2]/dx[3]"), P("2*dS/dx[3]dx[3]")}};
  MultiPoly from_u = P(golden::moduli_x7().lines[0].rhs).substitute(sub);
  CHECK(from_u == P(golden::moduli_S_x7().lines[0].rhs));
  CHECK(from_u - P(golden::moduli_S_x7_g2_as_printed()) == P("3/2*g2*dg2/dx[3]"));
}

TEST_CASE("constant fields do not move") {
  HydroSystem m = moduli_flow_g1(relations(1), 7);
  std::map<VarId, MultiPoly> still;
  for (VarId f : m.fields) still[var_id(name_jet(var_name(f), 3))] = MultiPoly();
  for (const auto& r : m.rhs) CHECK(r.substitute(still).is_zero());
}

TEST_CASE("u0 = 0 reduction and Benney") {
  const RelationSet& rs = relations(1);
  MultiPoly inv;
  HydroSystem c = constrained_flow_g1(rs, &inv);
  CHECK(inv.is_zero());
  check_printed(c, golden::constrained_x5());
  check_printed(constrained_moduli_flow(rs), golden::constrained_moduli_x5());
  CHECK(discriminant_flow_constrained(rs) == P(golden::discriminant_constrained_x5()));
  HydroSystem b = benney_system(rs);
  check_printed(b, golden::benney());
  CHECK(b.time_label == "t");
}

TEST_CASE("Benney characteristic matrix diagonalizes") {
  // u_t + A u_x = 0 with A = [[u, 1], [v, u]]; with v = s^2 the left
  // eigenvectors of r = u +- 2 s are (+-s, 1) for eigenvalues u +- s.
  HydroSystem b = benney_system(relations(1));
  auto A = [&](std::size_t i, const char* jet) { return -b.rhs[i].derivative(var_id(jet)); };
  std::map<VarId, MultiPoly> v_is_s2{{var_id("v"), P("s^2")}};
  for (int sign : {1, -1}) {
    MultiPoly l0 = Rational(sign) * P("s"), l1(1), lam = P("u") + Rational(sign) * P("s");
    MultiPoly c0 = l0 * A(0, "du/dx[3]") + l1 * A(1, "du/dx[3]") - lam * l0;
    MultiPoly c1 = l0 * A(0, "dv/dx[3]") + l1 * A(1, "dv/dx[3]") - lam * l1;
    CHECK(c0.substitute(v_is_s2).is_zero());
    CHECK(c1.substitute(v_is_s2).is_zero());
  }
}

TEST_CASE("Riemann invariants of the genus one flow") {
  for (const auto& r : riemann_consistency_g1(relations(1))) CHECK(r.is_zero());
  DiagonalSystem d = riemann_system_g1();
  std::map<VarId, MultiPoly> equal;
  for (VarId g : d.invariants) equal[g] = P("gamma");
  for (const auto& s : d.speeds) CHECK(s.substitute(equal) == P("5/2*gamma"));
  // same scalar speed from the u-form at u2 = -3 gamma, u1 = 3 gamma^2, u0 = -gamma^3
  HydroSystem u = derive_dckdv(1, relations(1), 1);
  std::map<VarId, MultiPoly> triple{{var_id("u[2]"), P("-3*gamma")}, {var_id("u[1]"), P("3*gamma^2")}, {var_id("u[0]"), P("-gamma^3")}};
  MultiPoly u2t = substitute_fields(u.rhs_of("u[2]"), triple, {var_id("gamma")}, 3);
  CHECK(u2t == P("-3*5/2*gamma*dgamma/dx[3]"));
}

TEST_CASE("numeric cubic roots") {
  auto z = cubic_roots_desc(0, 0, 0);
  for (double r : z) CHECK(r == 0.0);
  CHECK_THROWS_AS(cubic_roots_desc(1, 0, 0), ComplexRoots);  // lam^3 + 1
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-2, 2);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    std::array<double, 3> g{U(rng), U(rng), U(rng)};
    std::sort(g.begin(), g.end(), std::greater<double>());
    auto u = curve_from_roots(g);
    auto back = cubic_roots_desc(u[0], u[1], u[2]);
    auto u2 = curve_from_roots(back);
    for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(u2[k] - u[k]));
  }
  CHECK(worst < 1e-12);
  auto r = cubic_roots_desc(-6, 11, -6);  // (lam-1)(lam-2)(lam-3)
  CHECK(r[0] == doctest::Approx(3).epsilon(1e-14));
  CHECK(r[2] == doctest::Approx(1).epsilon(1e-14));
  auto sp = riemann_speeds_g1({3, 2, 1});
  CHECK(sp[0] == doctest::Approx(6));
  CHECK(sp[2] == doctest::Approx(4));
}

TEST_CASE("flow errors") {
  CHECK_THROWS_AS(derive_dckdv(1, relations(1), 3), InvalidFlow);
  CHECK_THROWS_AS(generator_flow(1, relations(1), 4), InvalidFlow);
  CHECK_THROWS_AS(generator_flow(1, relations(1), 21), InvalidFlow);
  CHECK_THROWS_AS(total_derivative(P("du[1]/dx[3]dx[3]"), {var_id("u[1]")}, 3), JetDepthExceeded);
}
