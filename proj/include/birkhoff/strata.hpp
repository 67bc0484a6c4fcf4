#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "birkhoff/laurent_series.hpp"
#include "birkhoff/relation_set.hpp"
#include "birkhoff/report.hpp"

namespace birkhoff {

// Which part of the stratum Sigma_{2g} is generated and how deep.
//
// Series p_j exist for every even j and for odd 2g+1 <= j <= window. The
// lowest kept exponent of p_{2g+1} is `depth`; higher p_j keep one exponent
// less per step in j, so each kept H symbol is determined by the products
// available in the window.
struct StratumSpec {
  int genus = 0;
  int window = 7;
  int depth = -17;
  // Products p_a p_b with a, b <= closure are re-expanded and their full
  // remainders recorded as residual relations.
  int closure = 7;

  static StratumSpec defaults(int g);
  static StratumSpec with_window(int g, int window);
  // Tightest depth that still determines every kept symbol.
  static StratumSpec minimal(int g, int window);

  void validate() const;
  int lead() const { return 2 * genus + 1; }
  // Lowest kept exponent of p_j (odd j).
  int floor_of(int j) const { return depth + (j - lead()); }
  bool is_basis_order(int e) const { return e >= 0 && (e % 2 == 0 || e >= lead()); }
  // 0..window in increasing order, skipping odd orders below 2g+1.
  std::vector<int> basis_indices() const;
};

// Index j -> p_j(z) with raw H symbols as coefficients.
std::map<int, LaurentSeries> basis_series(const StratumSpec& spec);

// Weight of H[j][k] in the grading under which all relations are homogeneous.
inline int h_weight(int j, int k) { return j + k; }

RelationSet derive_relations(const StratumSpec& spec);

// H[2k-1][1] - 2^k (2k-1) binom(1/2,k) H[1][1]^k.
MultiPoly general_g0_closed_forms(int k);

// Decomposition x = sum_l c_l p_l + remainder, remainder supported on
// non-basis exponents.
struct Reexpansion {
  std::map<int, MultiPoly> coeffs;
  LaurentSeries remainder;
};
Reexpansion reexpand(const LaurentSeries& x, const std::map<int, LaurentSeries>& basis, const StratumSpec& spec);

class StructureConstantTable {
public:
  StructureConstantTable() = default;
  StructureConstantTable(int genus, int window) : genus_(genus), window_(window) {}

  void set_pair(int j, int k, std::map<int, MultiPoly> expansion);
  bool has_pair(int j, int k) const;
  // Throws WindowExceeded if (j,k) was not tabulated.
  const std::map<int, MultiPoly>& expansion(int j, int k) const;
  MultiPoly at(int j, int k, int l) const;

  int genus() const { return genus_; }
  int window() const { return window_; }
  const std::map<std::pair<int, int>, std::map<int, MultiPoly>>& pairs() const { return pairs_; }

private:
  int genus_ = 0;
  int window_ = 0;
  std::map<std::pair<int, int>, std::map<int, MultiPoly>> pairs_;  // key j <= k
};

// Tabulates every pair (j,k) of basis indices up to spec.window whose product
// stays inside the basis. `max_small` > 0 restricts to pairs with
// min(j,k) <= max_small.
StructureConstantTable structure_constants(const StratumSpec& spec, const RelationSet& rs, int max_small = 0);

// Spec and relation set large enough to check associativity for basis
// indices up to m.
StratumSpec associativity_spec(int g, int m);

Report verify_associativity(const StructureConstantTable& table, const RelationSet& rs, const std::vector<int>& indices);
Report symmetry_check_g0(const RelationSet& rs, int window);

// Every product p_j p_k with j,k <= upto re-expands with zero remainder.
Report verify_product_closure(const StratumSpec& spec, const RelationSet& rs, int upto);

}  // namespace birkhoff
