#include "birkhoff/cohomology.hpp"

#include <cmath>

#include "birkhoff/errors.hpp"

namespace birkhoff {

VarId d_symbol(VarId h) {
  int j, k;
  if (!parse_H(var_name(h), j, k)) throw Error("d_symbol: not an H symbol: " + var_name(h));
  return var_id(name_D(j, k));
}

TangentRelationSet linearize(const RelationSet& rs) {
  TangentRelationSet t;
  t.base = rs;
  for (VarId g : rs.generators()) t.d_generators.push_back(d_symbol(g));
  for (VarId v : rs.solved_order()) {
    const MultiPoly& r = *rs.solution(v);
    MultiPoly lin;
    for (std::size_t i = 0; i < rs.generators().size(); ++i) {
      VarId g = rs.generators()[i];
      if (r.mentions(g)) lin.add_product(r.derivative(g), MultiPoly::var(t.d_generators[i]));
    }
    t.linearized.emplace(d_symbol(v), std::move(lin));
  }
  return t;
}

MultiPoly reduce_tangent(const MultiPoly& f, const TangentRelationSet& trs) {
  MultiPoly g = f.substitute([&](VarId v) -> const MultiPoly* {
    auto it = trs.linearized.find(v);
    return it == trs.linearized.end() ? nullptr : &it->second;
  });
  return reduce_partial(g, trs.base);
}

MultiPoly variation(const MultiPoly& f, const TangentRelationSet& trs) {
  MultiPoly r = reduce_partial(f, trs.base);
  MultiPoly d;
  const auto& gens = trs.base.generators();
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (r.mentions(gens[i])) d.add_product(r.derivative(gens[i]), MultiPoly::var(trs.d_generators[i]));
  return d;
}

// ------------------------------------------------------------ series side

CocycleContext make_cocycle_context(const StratumSpec& spec) {
  CocycleContext c;
  c.spec = spec;
  RelationSet rs = derive_relations(spec);
  c.table = structure_constants(spec, rs);
  for (auto& [j, s] : basis_series(spec)) c.basis.emplace(j, s.map([&](const MultiPoly& p) { return reduce(p, rs); }));
  // Products of tabulated pairs reach even exponents up to twice the window.
  for (int e = 0; e <= 2 * spec.window + 2; e += 2)
    if (!c.basis.count(e)) c.basis.emplace(e, LaurentSeries::monomial(e));
  c.ideal = ideal_basis(spec.genus, std::max(0, (spec.window - spec.lead()) / 2));
  c.trs = linearize(rs);
  return c;
}

namespace {

LaurentSeries reduced(const LaurentSeries& s, const TangentRelationSet& trs) {
  return s.map([&](const MultiPoly& p) { return reduce_tangent(p, trs); });
}

MultiPoly p_symbol(int j) {
  return j % 2 == 0 ? MultiPoly::monomial(Monomial::of(var_id("lam"), static_cast<std::uint32_t>(j / 2)), 1)
                    : MultiPoly::var(name_p(j));
}

const LaurentSeries& basis_of(const CocycleContext& ctx, int j) {
  auto it = ctx.basis.find(j);
  if (it == ctx.basis.end()) throw WindowExceeded("p_" + std::to_string(j) + " is outside the window");
  return it->second;
}

bool in_basis(const CocycleContext& ctx, int j) { return ctx.spec.is_basis_order(j) && j <= ctx.spec.window; }

// Tabulated and every p_l in the product is available as a series.
bool tabulated(const CocycleContext& ctx, int j, int k) { return j + k <= ctx.spec.window && ctx.table.has_pair(j, k); }

// Sum over l of c_l * psi(l, k).
template <typename F>
LaurentSeries expand_left(const std::map<int, MultiPoly>& coeffs, int k, F&& psi) {
  LaurentSeries out;
  for (const auto& [l, c] : coeffs) out += c * psi(l, k);
  return out;
}

}  // namespace

LaurentSeries coboundary_series(const CocycleContext& ctx, int j) {
  if (j % 2 == 1 && j < ctx.spec.lead())
    throw IndexBelowStratum("f(p_" + std::to_string(j) + "): odd index below 2g+1");
  if (j % 2 == 0) return LaurentSeries();
  return basis_of(ctx, j).map([&](const MultiPoly& p) { return variation(p, ctx.trs); });
}

LaurentSeries cocycle_series(const CocycleContext& ctx, int j, int k) {
  LaurentSeries out;
  for (const auto& [l, c] : ctx.table.expansion(j, k)) {
    MultiPoly d = variation(c, ctx.trs);
    if (!d.is_zero()) out += d * basis_of(ctx, l);
  }
  return out;
}

MultiPoly cocycle_symbolic(const CocycleContext& ctx, int j, int k) {
  std::map<int, MultiPoly> coeffs;
  for (const auto& [l, c] : ctx.table.expansion(j, k)) {
    MultiPoly d = variation(c, ctx.trs);
    if (!d.is_zero()) coeffs.emplace(l, std::move(d));
  }
  return basis_combination(coeffs);
}

Report cocycle_identity_check(const CocycleContext& ctx, const std::vector<std::array<int, 3>>& triples) {
  Report rep;
  rep.name = "cocycle identity";
  std::size_t skipped = 0;
  std::map<std::pair<int, int>, LaurentSeries> psi_cache;
  std::map<std::pair<int, int>, MultiPoly> sym_cache;
  auto psi = [&](int j, int k) -> const LaurentSeries& {
    auto key = std::minmax(j, k);
    auto it = psi_cache.find(key);
    if (it == psi_cache.end()) it = psi_cache.emplace(key, cocycle_series(ctx, j, k)).first;
    return it->second;
  };
  auto psi_sym = [&](int j, int k) -> const MultiPoly& {
    auto key = std::minmax(j, k);
    auto it = sym_cache.find(key);
    if (it == sym_cache.end()) it = sym_cache.emplace(key, cocycle_symbolic(ctx, j, k)).first;
    return it->second;
  };
  for (const auto& [a, b, c] : triples) {
    if (!in_basis(ctx, a) || !in_basis(ctx, b) || !in_basis(ctx, c) || !tabulated(ctx, a, b) ||
        !tabulated(ctx, b, c)) {
      ++skipped;
      continue;
    }
    bool fits = true;
    for (const auto& [l, coef] : ctx.table.expansion(a, b)) fits &= tabulated(ctx, l, c);
    for (const auto& [l, coef] : ctx.table.expansion(b, c)) fits &= tabulated(ctx, a, l);
    fits &= tabulated(ctx, a, c);
    if (!fits) {
      ++skipped;
      continue;
    }
    ++rep.checked;
    LaurentSeries s = basis_of(ctx, a) * psi(b, c) - expand_left(ctx.table.expansion(a, b), c, psi) +
                      expand_left(ctx.table.expansion(b, c), a, psi) - basis_of(ctx, c) * psi(a, b);
    s = reduced(s, ctx.trs);
    if (!s.is_zero()) rep.fail("cocycle identity (series)", {a, b, c}, s.to_string());

    MultiPoly m = p_symbol(a) * psi_sym(b, c) - p_symbol(c) * psi_sym(a, b);
    for (const auto& [l, coef] : ctx.table.expansion(a, b)) m -= coef * psi_sym(l, c);
    for (const auto& [l, coef] : ctx.table.expansion(b, c)) m += coef * psi_sym(a, l);
    MultiPoly nf = reduce_mod_ideal(m, ctx.ideal, ctx.rs());
    if (!nf.is_zero()) rep.fail("cocycle identity (mod ideal)", {a, b, c}, nf.to_string());
  }
  if (skipped) rep.notes.push_back(std::to_string(skipped) + " triples leave the window and were skipped");
  return rep;
}

Report coboundary_check(const CocycleContext& ctx, const std::vector<std::pair<int, int>>& pairs) {
  Report rep;
  rep.name = "coboundary property";
  std::size_t skipped = 0;
  for (const auto& [a, b] : pairs) {
    if (!in_basis(ctx, a) || !in_basis(ctx, b) || !tabulated(ctx, a, b)) {
      ++skipped;
      continue;
    }
    ++rep.checked;
    LaurentSeries s = cocycle_series(ctx, a, b) - basis_of(ctx, a) * coboundary_series(ctx, b) -
                      basis_of(ctx, b) * coboundary_series(ctx, a);
    for (const auto& [l, c] : ctx.table.expansion(a, b)) s += c * coboundary_series(ctx, l);
    s = reduced(s, ctx.trs);
    if (!s.is_zero()) rep.fail("psi = a f(b) + b f(a) - f(ab)", {a, b}, s.to_string());
  }
  if (skipped) rep.notes.push_back(std::to_string(skipped) + " pairs leave the window and were skipped");
  return rep;
}

Report square_relation_check(const CocycleContext& ctx, const std::vector<int>& odd_indices) {
  Report rep;
  rep.name = "psi(p,p) = 2 p f(p)";
  const int lead = ctx.spec.lead();
  const MultiPoly psi_lead = cocycle_symbolic(ctx, lead, lead);
  const MultiPoly R = reduce_mod_ideal(MultiPoly::var(name_p(lead)).pow(2), ctx.ideal, ctx.rs());
  for (int j : odd_indices) {
    if (j % 2 == 0 || j < lead) throw IndexBelowStratum("p_" + std::to_string(j) + " is not an odd basis element");
    ++rep.checked;
    const LaurentSeries& p = basis_of(ctx, j);
    LaurentSeries s = reduced(cocycle_series(ctx, j, j) - MultiPoly(2) * (p * coboundary_series(ctx, j)), ctx.trs);
    if (!s.is_zero()) rep.fail("series", {j}, s.to_string());

    // p_j = a p, f(p_j) = D(a) p + a f(p) and 2 p f(p) = psi(p,p):
    // 2 p_j f(p_j) = 2 a D(a) R + a^2 psi(p,p).
    MultiPoly a = ideal_alpha(ctx.ideal, ctx.rs(), j);
    MultiPoly rhs = MultiPoly(2) * a * variation(a, ctx.trs) * R + a * a * psi_lead;
    MultiPoly nf = reduce_mod_ideal(cocycle_symbolic(ctx, j, j) - rhs, ctx.ideal, ctx.rs());
    if (!nf.is_zero()) rep.fail("mod ideal", {j}, nf.to_string());
  }
  return rep;
}

Report parity_check(const CocycleContext& ctx) {
  Report rep;
  rep.name = "parity";
  const int w = ctx.spec.window;
  auto idx = ctx.spec.basis_indices();
  for (int k : idx) {
    if (!tabulated(ctx, 0, k)) continue;
    ++rep.checked;
    LaurentSeries s = cocycle_series(ctx, 0, k);
    if (!s.is_zero()) rep.fail("psi(p_0, p_k)", {k}, s.to_string());
  }
  for (int n = 0; 2 * n <= w; ++n) {
    ++rep.checked;
    if (!coboundary_series(ctx, 2 * n).is_zero()) rep.fail("f(p_2n)", {2 * n}, "nonzero");
    for (int m = n; 2 * (n + m) <= w; ++m) {
      ++rep.checked;
      LaurentSeries s = cocycle_series(ctx, 2 * n, 2 * m);
      if (!s.is_zero()) rep.fail("psi(p_2n, p_2m)", {2 * n, 2 * m}, s.to_string());
    }
  }
  for (int j : idx)
    for (int k : idx) {
      if (j >= k || !tabulated(ctx, j, k)) continue;
      ++rep.checked;
      LaurentSeries s = reduced(cocycle_series(ctx, j, k) - cocycle_series(ctx, k, j), ctx.trs);
      if (!s.is_zero()) rep.fail("symmetry", {j, k}, s.to_string());
    }
  return rep;
}

namespace {

MultiPoly apply_direction(const MultiPoly& f, const RelationSet& rs, const std::map<VarId, MultiPoly>& dir) {
  MultiPoly r = reduce_partial(f, rs);
  MultiPoly d;
  for (const auto& [g, v] : dir)
    if (r.mentions(g)) d.add_product(r.derivative(g), v);
  return reduce_partial(d, rs);
}

std::vector<std::pair<int, int>> table_pairs(const CocycleContext& ctx, const std::vector<int>& indices) {
  std::vector<std::pair<int, int>> out;
  for (std::size_t a = 0; a < indices.size(); ++a)
    for (std::size_t b = a; b < indices.size(); ++b)
      if (tabulated(ctx, indices[a], indices[b])) out.emplace_back(indices[a], indices[b]);
  return out;
}

}  // namespace

CocycleTable vector_field_realization(const CocycleContext& ctx, const std::map<VarId, MultiPoly>& direction,
                                      const std::vector<int>& indices) {
  CocycleTable t;
  for (int j : indices)
    t.coboundary[j] = basis_of(ctx, j).map([&](const MultiPoly& c) { return apply_direction(c, ctx.rs(), direction); });
  for (const auto& [j, k] : table_pairs(ctx, indices)) {
    LaurentSeries s;
    for (const auto& [l, c] : ctx.table.expansion(j, k)) {
      MultiPoly x = apply_direction(c, ctx.rs(), direction);
      if (!x.is_zero()) s += x * basis_of(ctx, l);
    }
    t.entries[{j, k}] = reduced(s, ctx.trs);
  }
  return t;
}

CocycleTable substituted_realization(const CocycleContext& ctx, const std::map<VarId, MultiPoly>& direction,
                                     const std::vector<int>& indices) {
  std::map<VarId, MultiPoly> sub;
  const auto& gens = ctx.rs().generators();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    auto it = direction.find(gens[i]);
    sub[ctx.trs.d_generators[i]] = it == direction.end() ? MultiPoly() : it->second;
  }
  auto at_direction = [&](const LaurentSeries& s) {
    return s.map([&](const MultiPoly& c) { return reduce_partial(c.substitute(sub), ctx.rs()); });
  };
  CocycleTable t;
  for (int j : indices) t.coboundary[j] = j % 2 == 0 ? LaurentSeries() : at_direction(coboundary_series(ctx, j));
  for (const auto& [j, k] : table_pairs(ctx, indices)) t.entries[{j, k}] = at_direction(cocycle_series(ctx, j, k));
  return t;
}

bool tables_equal(const CocycleTable& a, const CocycleTable& b) {
  if (a.entries.size() != b.entries.size() || a.coboundary.size() != b.coboundary.size()) return false;
  for (const auto& [key, s] : a.entries) {
    auto it = b.entries.find(key);
    if (it == b.entries.end() || !(s - it->second).is_zero()) return false;
  }
  for (const auto& [key, s] : a.coboundary) {
    auto it = b.coboundary.find(key);
    if (it == b.coboundary.end() || !(s - it->second).is_zero()) return false;
  }
  return true;
}

// ------------------------------------------------------------ numeric side

void PairSamples::set(int a, int b, Samples s) {
  if (n == 0) n = s.size();
  if (s.size() != n) throw ShapeMismatch("sample array for (" + std::to_string(a) + "," + std::to_string(b) + ") has " +
                                         std::to_string(s.size()) + " points, expected " + std::to_string(n));
  values[{a, b}] = std::move(s);
}

bool PairSamples::has(int a, int b) const { return values.count({a, b}) != 0; }

const Samples& PairSamples::at(int a, int b) const {
  auto it = values.find({a, b});
  if (it == values.end()) throw ShapeMismatch("no samples for (" + std::to_string(a) + "," + std::to_string(b) + ")");
  return it->second;
}

namespace {

double sup_of(const std::map<int, Samples>& m) {
  double s = 0;
  for (const auto& [e, v] : m)
    for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

void accumulate(std::map<int, Samples>& into, int key, const Samples& v, double scale, std::size_t n) {
  if (v.size() != n) throw ShapeMismatch("sample arrays differ in length");
  auto& dst = into[key];
  if (dst.empty()) dst.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) dst[i] += scale * v[i];
}

// Symmetric lookup for the derivatives of dF.
const Samples& sym(const PairSamples& s, int a, int b) { return s.has(a, b) ? s.at(a, b) : s.at(b, a); }

}  // namespace

double CocycleSamples::sup_psi() const { return sup_of(psi); }
double CocycleSamples::sup_f() const { return sup_of(f); }

CocycleSamples numeric_cocycle_g0(const PairSamples& dF, int j, int k, int fmax) {
  CocycleSamples out;
  const std::size_t n = dF.n;
  const int a = 2 * j + 1, b = 2 * k + 1;
  for (int l = 0; l <= k; ++l) {
    int c = 2 * (k - l) + 1;
    accumulate(out.psi, 2 * l, sym(dF, a, c), -1.0 / c, n);
  }
  for (int l = 0; l <= j; ++l) {
    int c = 2 * (j - l) + 1;
    accumulate(out.psi, 2 * l, sym(dF, b, c), -1.0 / c, n);
  }
  for (int m = 0; m <= fmax; ++m) accumulate(out.f, -(2 * m + 1), sym(dF, a, 2 * m + 1), -1.0 / (2 * m + 1), n);
  return out;
}

CocycleSamples numeric_cocycle_g0_mixed(const PairSamples& dF, int j, int k) {
  CocycleSamples out;
  const int a = 2 * j + 1;
  for (int l = 0; l <= k - 1; ++l) {
    int c = 2 * (k - l) - 1;
    accumulate(out.psi, 2 * l + 1, sym(dF, a, c), -1.0 / c, dF.n);
  }
  return out;
}

CocycleSamples numeric_cocycle_g1(const PairSamples& H, const PairSamples& dH, int n, int m, int fmax) {
  if (H.n != dH.n) throw ShapeMismatch("H and dH sample counts differ");
  CocycleSamples out;
  const std::size_t N = dH.n;
  const int a = 2 * n + 1, b = 2 * m + 1;
  // z^{2n+1} times the tail of p_{2m+1} pairs H^{2m+1}_{2s+1} with p_{2(n-s)}.
  for (int s = -1; s <= m; ++s) accumulate(out.psi, 2 * (m - s), dH.at(a, 2 * s + 1), 1.0, N);
  for (int s = -1; s <= n; ++s) accumulate(out.psi, 2 * (n - s), dH.at(b, 2 * s + 1), 1.0, N);
  Samples two(N), zero(N);
  const Samples &Ham = H.at(a, -1), &Hap = H.at(a, 1), &Hbm = H.at(b, -1), &Hbp = H.at(b, 1);
  const Samples &dam = dH.at(a, -1), &dap = dH.at(a, 1), &dbm = dH.at(b, -1), &dbp = dH.at(b, 1);
  for (std::size_t i = 0; i < N; ++i) {
    two[i] = dam[i] * Hbm[i] + Ham[i] * dbm[i];
    zero[i] = dam[i] * Hbp[i] + Ham[i] * dbp[i] + dap[i] * Hbm[i] + Hap[i] * dbm[i];
  }
  accumulate(out.psi, 2, two, 1.0, N);
  accumulate(out.psi, 0, zero, 1.0, N);
  accumulate(out.f, 1, dam, 1.0, N);
  for (int k = 0; k <= fmax; ++k) accumulate(out.f, -(2 * k + 1), dH.at(a, 2 * k + 1), 1.0, N);
  return out;
}

CocycleSamples numeric_cocycle_g1_mixed(const PairSamples& dH, int n, int m) {
  CocycleSamples out;
  for (int k = -1; k <= n - 2; ++k) accumulate(out.psi, 2 * (n - k) - 1, dH.at(2 * m + 1, 2 * k + 1), 1.0, dH.n);
  return out;
}

CocycleSamples numeric_cocycle_dnls(const Samples& u, const Samples& v, const Samples& du, const Samples& dv) {
  const std::size_t n = u.size();
  if (v.size() != n || du.size() != n || dv.size() != n) throw ShapeMismatch("dNLS sample arrays differ in length");
  CocycleSamples out;
  Samples l2(n), l1(n);
  for (std::size_t i = 0; i < n; ++i) {
    l2[i] = -du[i];
    l1[i] = -dv[i] + 0.5 * u[i] * du[i];
  }
  out.psi[4] = std::move(l2);
  out.psi[2] = std::move(l1);
  return out;
}

CocycleSamples numeric_cocycle_dnls_phi(const Samples& phi33, const Samples& phi35, const Samples& dphi33,
                                         const Samples& dphi35) {
  const std::size_t n = phi33.size();
  if (phi35.size() != n || dphi33.size() != n || dphi35.size() != n)
    throw ShapeMismatch("phi jet arrays differ in length");
  Samples u(n), v(n), du(n), dv(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = phi35[i] / phi33[i];
    v[i] = -2 * phi33[i];
    du[i] = dphi35[i] / phi33[i] - phi35[i] * dphi33[i] / (phi33[i] * phi33[i]);
    dv[i] = -2 * dphi33[i];
  }
  return numeric_cocycle_dnls(u, v, du, dv);
}

}  // namespace birkhoff
