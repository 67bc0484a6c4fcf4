#include "birkhoff/strata.hpp"

#include <algorithm>
#include <set>

#include "birkhoff/errors.hpp"

namespace birkhoff {

// ------------------------------------------------------------------ spec

StratumSpec StratumSpec::defaults(int g) { return with_window(g, 6 * g + 7); }

StratumSpec StratumSpec::with_window(int g, int window) {
  StratumSpec s;
  s.genus = g;
  s.window = window;
  s.depth = -(2 * (window - 2 * g) + 3);
  s.closure = window;
  return s;
}

StratumSpec StratumSpec::minimal(int g, int window) {
  StratumSpec s = with_window(g, window);
  s.depth = -(2 * (window - 2 * g) + 1);
  return s;
}

void StratumSpec::validate() const {
  if (genus < 0) throw InvalidStratum("genus must be non-negative");
  if (window < lead() || window % 2 == 0)
    throw InvalidStratum("window must be odd and at least 2g+1 = " + std::to_string(lead()));
  if (depth > -(2 * (window - 2 * genus) + 1))
    throw InconsistentTruncation("depth " + std::to_string(depth) + " too shallow for window " +
                                 std::to_string(window) + "; need <= " +
                                 std::to_string(-(2 * (window - 2 * genus) + 1)));
  if (depth % 2 == 0) throw InvalidStratum("depth must be odd");
  if (closure > window) throw InvalidStratum("closure bound exceeds window");
}

std::vector<int> StratumSpec::basis_indices() const {
  std::vector<int> v;
  for (int j = 0; j <= window; ++j)
    if (is_basis_order(j)) v.push_back(j);
  return v;
}

// ---------------------------------------------------------------- series

std::map<int, LaurentSeries> basis_series(const StratumSpec& spec) {
  spec.validate();
  std::map<int, LaurentSeries> out;
  for (int j = 0; j <= spec.window; j += 2) out.emplace(j, LaurentSeries::monomial(j));
  for (int j = spec.lead(); j <= spec.window; j += 2) {
    int fl = spec.floor_of(j);
    LaurentSeries p(fl, j);
    p.set(j, MultiPoly(1));
    // Exponents -k for k = 1-2g, 3-2g, ... down to the floor.
    for (int k = 1 - 2 * spec.genus; -k >= fl; k += 2) p.set(-k, MultiPoly::var(name_H(j, k)));
    out.emplace(j, std::move(p));
  }
  return out;
}

Reexpansion reexpand(const LaurentSeries& x, const std::map<int, LaurentSeries>& basis, const StratumSpec& spec) {
  Reexpansion r;
  LaurentSeries rest = x;
  for (int e = x.top(); e >= 0; --e) {
    if (!spec.is_basis_order(e)) continue;
    if (e < rest.floor())
      throw WindowExceeded("coefficient of p_" + std::to_string(e) + " lies below the known window");
    MultiPoly c = rest.coeff(e);
    if (c.is_zero()) continue;
    if (e % 2 == 0) {
      rest -= LaurentSeries::monomial(e, c);  // p_{2m} = z^{2m} exactly
    } else {
      auto it = basis.find(e);
      if (it == basis.end()) throw WindowExceeded("p_" + std::to_string(e) + " is outside the window");
      rest -= c * it->second;
    }
    r.coeffs.emplace(e, std::move(c));
  }
  r.remainder = std::move(rest);
  return r;
}

// ------------------------------------------------------------- relations

namespace {

struct Equation {
  MultiPoly poly;
  int weight;
};

int weight_of(VarId v) {
  int j, k;
  if (!parse_H(var_name(v), j, k)) throw UnknownVariable(var_name(v) + " is not an H symbol");
  return h_weight(j, k);
}

// p_i p_j can be fully re-expanded: its odd top order is a basis element in
// the window and every basis coefficient lies above the product's floor.
bool product_in_window(const StratumSpec& spec, const std::map<int, LaurentSeries>& basis, int i, int j) {
  bool odd = (i + j) % 2 == 1;
  if (odd && i + j > spec.window) return false;
  return product_floor(basis.at(i), basis.at(j)) <= (odd ? spec.lead() : 0);
}

// Coefficients of the remainder give one homogeneous equation each.
void collect(const Reexpansion& r, int product_order, std::vector<Equation>& out) {
  for (const auto& [e, c] : r.remainder.coeffs()) out.push_back({c, product_order - e});
}

// Gaussian elimination over Q on the weight-w block. Unknowns are the
// non-generator symbols of weight w; generators of weight w stay on the
// right-hand side.
void solve_weight(int w, std::vector<MultiPoly> rows, const std::vector<VarId>& unknowns, RelationSet& rs) {
  const std::size_t n = unknowns.size();
  std::map<VarId, std::size_t> col;
  for (std::size_t i = 0; i < n; ++i) col.emplace(unknowns[i], i);

  struct Row {
    std::vector<Rational> a;
    MultiPoly b;  // rest of the equation: a.u + b = 0
  };
  std::vector<Row> m;
  for (auto& p : rows) {
    Row row{std::vector<Rational>(n), MultiPoly()};
    std::vector<Term> rest;
    for (const auto& t : p.terms()) {
      const auto& f = t.mono.factors();
      if (f.size() == 1 && f[0].second == 1) {
        auto it = col.find(f[0].first);
        if (it != col.end()) {
          row.a[it->second] += t.coeff;
          continue;
        }
      }
      for (const auto& [v, e] : f)
        if (col.count(v)) throw InconsistentTruncation("nonlinear occurrence of " + var_name(v));
      rest.push_back(t);
    }
    row.b = MultiPoly::from_terms(std::move(rest));
    m.push_back(std::move(row));
  }

  std::vector<int> pivot_row(n, -1);
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < m.size(); ++c) {
    std::size_t p = r;
    while (p < m.size() && m[p].a[c].is_zero()) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    Rational inv = Rational(1) / m[r].a[c];
    for (auto& x : m[r].a) x *= inv;
    m[r].b *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i].a[c].is_zero()) continue;
      Rational f = m[i].a[c];
      for (std::size_t k = 0; k < n; ++k) m[i].a[k] -= f * m[r].a[k];
      m[i].b -= m[r].b * f;
    }
    pivot_row[c] = static_cast<int>(r);
    ++r;
  }
  for (std::size_t c = 0; c < n; ++c) {
    if (pivot_row[c] < 0)
      throw InconsistentTruncation(var_name(unknowns[c]) + " (weight " + std::to_string(w) +
                                   ") is not determined inside the window");
    const Row& row = m[pivot_row[c]];
    for (std::size_t k = 0; k < n; ++k)
      if (k != c && !row.a[k].is_zero())
        throw InconsistentTruncation("underdetermined block at weight " + std::to_string(w));
    rs.add_solution(unknowns[c], -row.b);
  }
  for (std::size_t i = r; i < m.size(); ++i)
    if (!m[i].b.is_zero())
      throw InconsistentTruncation("relation among generators at weight " + std::to_string(w) + ": " +
                                   m[i].b.to_string());
}

}  // namespace

RelationSet derive_relations(const StratumSpec& spec) {
  spec.validate();
  const int g = spec.genus, lead = spec.lead();
  auto basis = basis_series(spec);

  RelationSet rs;
  for (int k = 1 - 2 * g; k <= lead; k += 2) rs.add_generator(var_id(name_H(lead, k)));

  // Unknowns by weight, in ascending (j, k).
  std::map<int, std::vector<VarId>> unknowns;
  for (int j = lead; j <= spec.window; j += 2)
    for (const auto& [e, c] : basis.at(j).coeffs()) {
      if (e == j) continue;
      VarId v = *c.variables().begin();
      if (!rs.is_generator(v)) unknowns[h_weight(j, -e)].push_back(v);
    }
  for (auto& [w, vs] : unknowns)
    std::sort(vs.begin(), vs.end(), [](VarId a, VarId b) {
      int ja, ka, jb, kb;
      parse_H(var_name(a), ja, ka);
      parse_H(var_name(b), jb, kb);
      return std::pair(ja, ka) < std::pair(jb, kb);
    });

  // The remainders of p_{2g+1}^2 and z^2 p_j already determine every symbol.
  std::vector<Equation> eqs;
  const LaurentSeries& plead = basis.at(lead);
  collect(reexpand(plead * plead, basis, spec), 2 * lead, eqs);
  for (int j = lead; j + 2 <= spec.window; j += 2)
    collect(reexpand(basis.at(j).shifted(2), basis, spec), j + 2, eqs);

  std::map<int, std::vector<MultiPoly>> by_weight;
  for (auto& e : eqs) by_weight[e.weight].push_back(std::move(e.poly));
  std::set<int> weights;
  for (const auto& [w, _] : by_weight) weights.insert(w);
  for (const auto& [w, _] : unknowns) weights.insert(w);

  for (int w : weights) {
    std::vector<MultiPoly> rows;
    for (const auto& p : by_weight[w]) {
      MultiPoly q = reduce_partial(p, rs);
      if (!q.is_zero()) rows.push_back(std::move(q));
    }
    for (const auto& p : rows)
      for (VarId v : p.variables())
        if (!rs.is_generator(v) && !rs.is_solved(v) && weight_of(v) != w)
          throw InconsistentTruncation(var_name(v) + " appears before it is solved");
    solve_weight(w, std::move(rows), unknowns[w], rs);
  }

  // Remaining products are a consistency check on the solution.
  auto idx = spec.basis_indices();
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a; b < idx.size(); ++b) {
      int i = idx[a], j = idx[b];
      if (j > spec.closure) continue;
      if (i % 2 == 0 && j % 2 == 0) continue;  // exact, no remainder
      if (!product_in_window(spec, basis, i, j)) continue;
      Reexpansion r = reexpand(basis.at(i) * basis.at(j), basis, spec);
      for (const auto& [e, c] : r.remainder.coeffs()) {
        rs.add_residual(c);
        if (!reduce(c, rs).is_zero())
          throw InconsistentTruncation("product p_" + std::to_string(i) + " p_" + std::to_string(j) +
                                       " leaves z^" + std::to_string(e) + " remainder " +
                                       reduce(c, rs).to_string());
      }
    }
  return rs;
}

MultiPoly general_g0_closed_forms(int k) {
  if (k < 1) throw Error("general_g0_closed_forms: k must be positive");
  Rational c = Rational(1L << k) * Rational(2 * k - 1) * binomial_half(static_cast<unsigned>(k));
  return MultiPoly::var(name_H(2 * k - 1, 1)) - c * MultiPoly::var(name_H(1, 1)).pow(k);
}

// ------------------------------------------------------ structure constants

void StructureConstantTable::set_pair(int j, int k, std::map<int, MultiPoly> expansion) {
  pairs_[{std::min(j, k), std::max(j, k)}] = std::move(expansion);
}

bool StructureConstantTable::has_pair(int j, int k) const {
  return pairs_.count({std::min(j, k), std::max(j, k)}) != 0;
}

const std::map<int, MultiPoly>& StructureConstantTable::expansion(int j, int k) const {
  auto it = pairs_.find({std::min(j, k), std::max(j, k)});
  if (it == pairs_.end())
    throw WindowExceeded("no structure constants for (" + std::to_string(j) + "," + std::to_string(k) + ")");
  return it->second;
}

MultiPoly StructureConstantTable::at(int j, int k, int l) const {
  const auto& e = expansion(j, k);
  auto it = e.find(l);
  return it == e.end() ? MultiPoly() : it->second;
}

StructureConstantTable structure_constants(const StratumSpec& spec, const RelationSet& rs, int max_small) {
  auto basis = basis_series(spec);
  StructureConstantTable table(spec.genus, spec.window);
  auto idx = spec.basis_indices();
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a; b < idx.size(); ++b) {
      int i = idx[a], j = idx[b];
      if (max_small > 0 && i > max_small) continue;
      const LaurentSeries &pi = basis.at(i), &pj = basis.at(j);
      // Every basis element is z^l plus non-basis exponents, so C^l is just
      // the z^l coefficient; only exponents >= the lowest basis order matter.
      int lowest = ((i + j) % 2 == 0) ? 0 : spec.lead();
      int fl = product_floor(pi, pj);
      if (fl > lowest) continue;
      std::map<int, MultiPoly> exp;
      for (int l = i + j; l >= lowest; --l) {
        if (!spec.is_basis_order(l)) continue;
        MultiPoly c;
        for (const auto& [e, ci] : pi.coeffs()) {
          int need = l - e;
          auto it = pj.coeffs().find(need);
          if (it == pj.coeffs().end()) continue;
          c.add_product(ci, it->second);
        }
        c = reduce(c, rs);
        if (!c.is_zero()) exp.emplace(l, std::move(c));
      }
      table.set_pair(i, j, std::move(exp));
    }
  return table;
}

StratumSpec associativity_spec(int g, int m) {
  // Products C_{lm} with l up to 2m must be tabulated.
  int window = std::max(2 * m + 1, 2 * g + 1);
  StratumSpec s = StratumSpec::minimal(g, window);
  s.closure = std::min(window, 2 * g + 5);
  return s;
}

Report verify_associativity(const StructureConstantTable& table, const RelationSet& rs, const std::vector<int>& indices) {
  Report rep;
  rep.name = "associativity";
  for (int j : indices)
    for (int k : indices)
      for (int m : indices) {
        ++rep.checked;
        // (p_j p_k) p_m - p_j (p_k p_m); antisymmetric under j <-> m.
        if (j >= m) continue;
        std::map<int, MultiPoly> lhs, rhs;
        for (const auto& [l, c] : table.expansion(j, k))
          for (const auto& [r, d] : table.expansion(l, m)) lhs[r].add_product(c, d);
        for (const auto& [l, c] : table.expansion(k, m))
          for (const auto& [r, d] : table.expansion(j, l)) rhs[r].add_product(c, d);
        std::set<int> keys;
        for (const auto& [r, _] : lhs) keys.insert(r);
        for (const auto& [r, _] : rhs) keys.insert(r);
        for (int r : keys) {
          MultiPoly res = reduce(lhs[r] - rhs[r], rs);
          if (!res.is_zero()) rep.fail("associativity", {j, k, m, r}, res.to_string());
        }
      }
  return rep;
}

Report symmetry_check_g0(const RelationSet& rs, int window) {
  Report rep;
  rep.name = "symmetry kH[j][k] = jH[k][j]";
  for (int j = 1; j <= window; j += 2)
    for (int k = 1; k <= window; k += 2) {
      auto a = find_var(name_H(j, k)), b = find_var(name_H(k, j));
      auto known = [&](const std::optional<VarId>& v) { return v && (rs.is_generator(*v) || rs.is_solved(*v)); };
      if (!known(a) || !known(b)) continue;
      ++rep.checked;
      MultiPoly e = Rational(k) * MultiPoly::var(*a) - Rational(j) * MultiPoly::var(*b);
      MultiPoly res = reduce(e, rs);
      if (!res.is_zero()) rep.fail("symmetry", {j, k}, res.to_string());
    }
  return rep;
}

Report verify_product_closure(const StratumSpec& spec, const RelationSet& rs, int upto) {
  Report rep;
  rep.name = "product closure";
  auto basis = basis_series(spec);
  auto idx = spec.basis_indices();
  for (int i : idx)
    for (int j : idx) {
      if (j < i || j > upto) continue;
      if (!product_in_window(spec, basis, i, j)) continue;
      ++rep.checked;
      Reexpansion r = reexpand(basis.at(i) * basis.at(j), basis, spec);
      for (const auto& [e, c] : r.remainder.coeffs()) {
        MultiPoly res = reduce(c, rs);
        if (!res.is_zero()) rep.fail("remainder", {i, j, e}, res.to_string());
      }
    }
  return rep;
}

}  // namespace birkhoff
