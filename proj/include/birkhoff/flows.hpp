#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "birkhoff/geometry.hpp"
#include "birkhoff/relation_set.hpp"
#include "birkhoff/report.hpp"

namespace birkhoff {

// d field_i / d time = rhs_i, with rhs polynomial in the fields and their
// jets along x[space_index] (symbols from name_jet).
struct HydroSystem {
  std::string name;
  std::string time_label;  // "x5", or "t" for a reversed time
  int space_index = 3;
  std::vector<VarId> fields;
  std::vector<MultiPoly> rhs;

  MultiPoly jet(std::size_t i) const;
  std::size_t index_of(VarId field) const;  // throws InvalidFlow
  const MultiPoly& rhs_of(std::string_view field) const;
};

MultiPoly jet_of(VarId field, int space_index, int order = 1);

// Total x derivative of an expression in fields and first jets. Second jets
// would need a third-order symbol and raise JetDepthExceeded.
MultiPoly total_derivative(const MultiPoly& e, const std::vector<VarId>& fields, int space_index);

// Replaces each old field by a polynomial in new fields, and its jets by the
// total derivative of that polynomial.
MultiPoly substitute_fields(const MultiPoly& e, const std::map<VarId, MultiPoly>& old_in_new,
                            const std::vector<VarId>& new_fields, int space_index);

// Every rhs term carries exactly one first jet to the first power.
bool is_hydrodynamic(const HydroSystem& s);

// Invertible polynomial change of variables; both directions must be given.
HydroSystem change_variables(const HydroSystem& s, const std::vector<VarId>& new_fields,
                             const std::map<VarId, MultiPoly>& new_in_old,
                             const std::map<VarId, MultiPoly>& old_in_new, std::string name);

HydroSystem reverse_time(const HydroSystem& s, std::string label = "t");

// ------------------------------------------------------- derived systems

// Closedness of the forms sum_j H[j][i] dx_j gives
// d H[2g+1][i] / d x_t = d/dx_{2g+1} H[t][i], with H[t][i] reduced by rs.
std::vector<MultiPoly> conservation_fluxes(int g, const RelationSet& rs, int time_index);
HydroSystem generator_flow(int g, const RelationSet& rs, int time_index);

// Rules consumed by the Poisson-ideal check: every generator flow with time
// index in (2g+1, max_time].
JetRules generator_jet_rules(int g, const RelationSet& rs, int max_time);

// u[s] as polynomials in the generators, and the inverse map.
std::map<VarId, MultiPoly> curve_in_generators(int g);
std::map<VarId, MultiPoly> generators_in_curve(int g);

// u-form of the generator flow with time x_{2g+1+2 flow_index}.
HydroSystem derive_dckdv(int g, const RelationSet& rs, int flow_index);

// 2^k k (2k-1) binom(1/2,k).
Rational bh_coefficient(int k);
// Systems k = 1..kmax, each d u / d x_{2k-1} = c_k u^{k-1} u_x with u = H[1][1].
std::vector<HydroSystem> derive_bh_hierarchy(const RelationSet& rs0, int kmax);

// Cross derivative d_b(rhs_a) - d_a(rhs_b) for each field, through second jets.
std::vector<MultiPoly> commutativity_residual(const HydroSystem& a, const HydroSystem& b);
Report commutativity_check(const HydroSystem& a, const HydroSystem& b);

// ------------------------------------------------------------ genus one

// Fields (g2, g3, u[2]).
HydroSystem moduli_flow_g1(const RelationSet& rs1, int time_index);
// Fields (g2, g3, S) with S = S_{-1}; dS/dx[3] = H[3][-1], so the rhs may
// carry second jets of S.
HydroSystem moduli_flow_S_g1(const RelationSet& rs1, int time_index);
// d Delta / d x_t for Delta = -16 (4 g2^3 + 27 g3^2), in (g2, g3, u[2]) jets.
MultiPoly discriminant_flow_g1(const RelationSet& rs1, int time_index);

// The u[0] = 0 reduction of the x5 flow, fields (u[2], u[1]). `invariance`
// receives the u[0] rhs restricted to the constraint (zero when invariant).
HydroSystem constrained_flow_g1(const RelationSet& rs1, MultiPoly* invariance = nullptr);
// (u, v) = (-u[2], -u[1] + u[2]^2/4) and t = -x5.
HydroSystem benney_system(const RelationSet& rs1);
// d Delta/dx5 for Delta = 16 u1^2 (u2^2 - 4 u1) along the constrained flow,
// written in (g2, u[2]) jets.
MultiPoly discriminant_flow_constrained(const RelationSet& rs1);
// The constrained flow in (g2, u[2]).
HydroSystem constrained_moduli_flow(const RelationSet& rs1);

struct DiagonalSystem {
  std::string name;
  std::string time_label;
  std::vector<VarId> invariants;
  std::vector<MultiPoly> speeds;  // d gamma_i / dt = speeds_i * d gamma_i / dx
};

// d gamma_i / dx5 = (gamma_1 + gamma_2 + gamma_3 + 2 gamma_i)/2 * gamma_i,x3.
DiagonalSystem riemann_system_g1();
// u(gamma) via Vieta: u2 = -e1, u1 = e2, u0 = -e3.
std::map<VarId, MultiPoly> curve_in_roots_g1();
// Diagonal system pushed to u-form minus the derived x5 flow; zero if they agree.
std::vector<MultiPoly> riemann_consistency_g1(const RelationSet& rs1);

// Real roots of lam^3 + u2 lam^2 + u1 lam + u0, descending. ComplexRoots if
// the discriminant is below -1e-12 (relative).
std::array<double, 3> cubic_roots_desc(double u0, double u1, double u2);
std::array<double, 3> riemann_speeds_g1(const std::array<double, 3>& gamma);
std::array<double, 3> curve_from_roots(const std::array<double, 3>& gamma);  // (u0, u1, u2)

}  // namespace birkhoff
