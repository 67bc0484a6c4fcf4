#pragma once

#include <array>
#include <map>
#include <utility>
#include <vector>

#include "birkhoff/geometry.hpp"
#include "birkhoff/laurent_series.hpp"
#include "birkhoff/relation_set.hpp"
#include "birkhoff/report.hpp"
#include "birkhoff/strata.hpp"

namespace birkhoff {

// Tangent vectors to W_g: a variation D[j][k] of every H[j][k]. Only the
// generator variations are free; the others are the formal derivatives of
// the solved relations.
struct TangentRelationSet {
  RelationSet base;
  std::map<VarId, MultiPoly> linearized;  // D[j][k] -> linear form in generator D symbols
  std::vector<VarId> d_generators;        // D symbols of the generators, same order
};

TangentRelationSet linearize(const RelationSet& rs);

// D symbol of an H symbol; throws Error for anything else.
VarId d_symbol(VarId h);

// D(f) for f polynomial in H symbols: the Leibniz derivative, reduced to
// generators and generator D symbols.
MultiPoly variation(const MultiPoly& f, const TangentRelationSet& trs);

// Replaces non-generator H and D symbols; other symbols pass through.
MultiPoly reduce_tangent(const MultiPoly& f, const TangentRelationSet& trs);

// Everything the series checks need for one stratum and window.
struct CocycleContext {
  StratumSpec spec;
  TangentRelationSet trs;
  StructureConstantTable table;
  std::map<int, LaurentSeries> basis;  // p_j with reduced coefficients
  IdealBasis ideal;

  const RelationSet& rs() const { return trs.base; }
};

CocycleContext make_cocycle_context(const StratumSpec& spec);

// f(p_j) = sum_k D[j][k] z^{-k}; zero for even j. IndexBelowStratum for odd
// j < 2g+1.
LaurentSeries coboundary_series(const CocycleContext& ctx, int j);

// psi(p_j, p_k) = sum_l D(C^l_jk) p_l.
LaurentSeries cocycle_series(const CocycleContext& ctx, int j, int k);

// The same in lam / p symbols, p[2m] written as lam^m.
MultiPoly cocycle_symbolic(const CocycleContext& ctx, int j, int k);

// a psi(b,c) - psi(ab,c) + psi(a,bc) - c psi(a,b) = 0, both as series and
// modulo the ideal. Triples whose products leave the window are skipped
// and counted in the notes.
Report cocycle_identity_check(const CocycleContext& ctx, const std::vector<std::array<int, 3>>& triples);

// psi(a,b) = a f(b) + b f(a) - f(ab) as series.
Report coboundary_check(const CocycleContext& ctx, const std::vector<std::pair<int, int>>& pairs);

// psi(p_j,p_j) = 2 p_j f(p_j) as series, and modulo the ideal through
// p_j = alpha_j(lam) p_{2g+1}, p_{2g+1}^2 = R(lam).
Report square_relation_check(const CocycleContext& ctx, const std::vector<int>& odd_indices);

// psi(p_0, p_k) = 0, psi(p_2n, p_2m) = 0, f(p_2n) = 0, psi symmetric.
Report parity_check(const CocycleContext& ctx);

struct CocycleTable {
  std::map<std::pair<int, int>, LaurentSeries> entries;
  std::map<int, LaurentSeries> coboundary;
};

// The derivation X with X(generator) = direction[generator]: f(p_j) = X(p_j),
// psi(p_k,p_l) = -X(f_kl) = sum_l X(C^l_kl) p_l. Missing generators get 0.
CocycleTable vector_field_realization(const CocycleContext& ctx, const std::map<VarId, MultiPoly>& direction,
                                      const std::vector<int>& indices);

// Linearize first, then set each generator D symbol to its direction.
CocycleTable substituted_realization(const CocycleContext& ctx, const std::map<VarId, MultiPoly>& direction,
                                     const std::vector<int>& indices);

bool tables_equal(const CocycleTable& a, const CocycleTable& b);

// ------------------------------------------------------------ numeric side

using Samples = std::vector<double>;

// Arrays keyed by an index pair (a, b).
struct PairSamples {
  std::size_t n = 0;
  std::map<std::pair<int, int>, Samples> values;

  void set(int a, int b, Samples s);
  bool has(int a, int b) const;
  // ShapeMismatch if missing.
  const Samples& at(int a, int b) const;
};

// Coefficient arrays keyed by the exponent of z.
struct CocycleSamples {
  std::map<int, Samples> psi;
  std::map<int, Samples> f;

  double sup_psi() const;
  double sup_f() const;
};

// Big cell, from the second derivatives of a variation dF (key (a,b) holds
// d^2 dF / dx_a dx_b). With H^a_b = -(1/b) F_ab:
//   psi0(p_{2j+1},p_{2k+1}) = -sum_{l>=0} [ dF_{2j+1,2(k-l)+1}/(2(k-l)+1)
//                                          + dF_{2k+1,2(j-l)+1}/(2(j-l)+1) ] z^{2l},
//   f0(p_{2j+1}) = -sum_m dF_{2j+1,2m+1}/(2m+1) z^{-(2m+1)}, m up to fmax.
CocycleSamples numeric_cocycle_g0(const PairSamples& dF, int j, int k, int fmax = 3);
// psi0(p_{2j+1}, p_{2k}) = -sum_{l=0}^{k-1} dF_{2j+1,2(k-l)-1}/(2(k-l)-1) p_{2l+1}, keyed by 2l+1.
CocycleSamples numeric_cocycle_g0_mixed(const PairSamples& dF, int j, int k);

// Elliptic case from H^a_b samples and their variations dH^a_b = d dS_b/dx_a.
//   psi1(p_{2n+1},p_{2m+1}) keyed by the z exponent 2l (lam^l); f1(p_{2n+1}) by
//   the z exponent (including the z^1 term from dS_{-1}).
// Needs (2n+1, b) for b = -1..2m+1, (2m+1, b) for b = -1..2n+1, and f up to fmax.
CocycleSamples numeric_cocycle_g1(const PairSamples& H, const PairSamples& dH, int n, int m, int fmax = 3);
// psi1(p_{2n}, p_{2m+1}) = sum_{k=-1}^{n-2} dH^{2m+1}_{2k+1} p_{2(n-k)-1}, keyed by the p index.
CocycleSamples numeric_cocycle_g1_mixed(const PairSamples& dH, int n, int m);

// dNLS: psi1(p_3,p_3) = -du lam^2 + (-dv + u du / 2) lam.
CocycleSamples numeric_cocycle_dnls(const Samples& u, const Samples& v, const Samples& du, const Samples& dv);
// The same from phi jets, u = phi_35/phi_33 and v = -2 phi_33.
CocycleSamples numeric_cocycle_dnls_phi(const Samples& phi33, const Samples& phi35, const Samples& dphi33,
                                         const Samples& dphi35);

}  // namespace birkhoff
