#include "birkhoff/geometry.hpp"

namespace birkhoff {

std::vector<MultiPoly> generator_symbols(int g) {
  std::vector<MultiPoly> h;
  for (int k = 1 - 2 * g; k <= 2 * g + 1; k += 2) h.push_back(MultiPoly::var(name_H(2 * g + 1, k)));
  return h;
}

CurveCoeffs<MultiPoly> curve_symbolic(int g) { return curve_from_H(g, generator_symbols(g)); }

// ---------------------------------------------------------------- ideal

namespace {

const VarId& lam_id() {
  static const VarId v = var_id("lam");
  return v;
}

MultiPoly lam_pow(int e) { return MultiPoly::monomial(Monomial::of(lam_id(), static_cast<std::uint32_t>(e)), 1); }

MultiPoly curve_rhs(int g) {
  auto c = curve_symbolic(g);
  MultiPoly r = lam_pow(2 * g + 1);
  for (int k = 0; k <= 2 * g; ++k) r += c.u[k] * lam_pow(k);
  return r;
}

}  // namespace

IdealBasis ideal_basis(int g, int count) {
  IdealBasis b;
  b.genus = g;
  const int lead = 2 * g + 1;
  MultiPoly P = MultiPoly::var(name_p(lead));
  b.curve_poly = P * P - curve_rhs(g);
  MultiPoly lam = MultiPoly::var(lam_id());
  for (int k = 0; k < count; ++k) {
    int j = 2 * (g + k) + 1;
    b.m_polys.push_back(MultiPoly::var(name_p(j + 2)) - lam * MultiPoly::var(name_p(j)) +
                        MultiPoly::var(name_H(j, 1 - 2 * g)) * P);
  }
  return b;
}

MultiPoly ideal_alpha(const IdealBasis& ideal, const RelationSet& rs, int odd_index) {
  const int lead = 2 * ideal.genus + 1;
  if (odd_index < lead || odd_index % 2 == 0)
    throw IndexBelowStratum("p_" + std::to_string(odd_index) + " is not an odd basis element");
  if (odd_index > ideal.max_p_index())
    throw WindowExceeded("p_" + std::to_string(odd_index) + " is beyond the ideal basis");
  MultiPoly a(1), lam = MultiPoly::var(lam_id());
  for (int j = lead; j < odd_index; j += 2)
    a = lam * a - reduce_partial(MultiPoly::var(name_H(j, 1 - 2 * ideal.genus)), rs);
  return a;
}

MultiPoly reduce_mod_ideal(const MultiPoly& f, const IdealBasis& ideal, const RelationSet& rs) {
  const int lead = 2 * ideal.genus + 1;
  const VarId P = var_id(name_p(lead));

  // Rewrite every p symbol in terms of lam and p[2g+1].
  std::map<VarId, MultiPoly> sub;
  for (VarId v : f.variables()) {
    int j;
    if (!parse_p(var_name(v), j) || j == lead) continue;
    if (j % 2 == 0) sub.emplace(v, lam_pow(j / 2));
    else sub.emplace(v, ideal_alpha(ideal, rs, j) * MultiPoly::var(P));
  }
  MultiPoly g = sub.empty() ? f : f.substitute(sub);

  // P^e -> R^{e/2} P^{e mod 2} with P^2 = R on the curve.
  std::uint32_t top = g.degree_in(P);
  if (top >= 2) {
    const MultiPoly R = curve_rhs(ideal.genus);
    MultiPoly out;
    MultiPoly Rpow(1);
    for (std::uint32_t e = 0; e <= top; ++e) {
      if (e >= 2 && e % 2 == 0) Rpow = Rpow * R;
      MultiPoly c = g.coefficient(P, e);
      if (c.is_zero()) continue;
      MultiPoly term = c * Rpow;
      if (e % 2 == 1) term = term * MultiPoly::var(P);
      out += term;
    }
    g = std::move(out);
  }
  return reduce_partial(g, rs);
}

Report verify_l_relations(const IdealBasis& ideal, const RelationSet& rs, const StratumSpec& spec) {
  Report rep;
  rep.name = "l relations";
  const int g = ideal.genus, lead = 2 * g + 1;
  auto basis = basis_series(spec);
  const LaurentSeries& pl = basis.at(lead);
  const int top = std::min(spec.window, ideal.max_p_index());
  for (int j = lead + 2; j <= top; j += 2) {
    ++rep.checked;
    // Long division of p_j by p_{2g+1} in powers of lam = z^2.
    LaurentSeries rest = basis.at(j);
    MultiPoly alpha;
    for (int i = (j - lead) / 2; i >= 0; --i) {
      MultiPoly a = rest.coeff(lead + 2 * i);
      if (a.is_zero()) continue;
      rest -= a * pl.shifted(2 * i);
      alpha += a * lam_pow(i);
    }
    for (const auto& [e, c] : rest.coeffs()) {
      MultiPoly r = reduce(c, rs);
      if (!r.is_zero()) rep.fail("series division remainder", {j, e}, r.to_string());
    }
    MultiPoly l = MultiPoly::var(name_p(j)) - alpha * MultiPoly::var(name_p(lead));
    MultiPoly nf = reduce_mod_ideal(l, ideal, rs);
    if (!nf.is_zero()) rep.fail("l relation", {j}, nf.to_string());
  }
  return rep;
}

// ------------------------------------------------------- Poisson structure

MultiPoly x_derivative(const MultiPoly& f, int j, const std::vector<VarId>& generators, const JetRules& jets) {
  MultiPoly d;
  for (VarId gen : generators) {
    if (!f.mentions(gen)) continue;
    auto it = jets.find({gen, j});
    MultiPoly rate = it != jets.end() ? it->second : MultiPoly::var(name_jet(var_name(gen), j));
    d.add_product(f.derivative(gen), rate);
  }
  return d;
}

MultiPoly poisson_bracket(const MultiPoly& f, const MultiPoly& h, int genus, int max_index,
                          const std::vector<VarId>& generators, const JetRules& jets) {
  MultiPoly b;
  for (int j = 2 * genus + 1; j <= max_index; j += 2) {
    VarId p = var_id(name_p(j));
    MultiPoly fp = f.derivative(p), hp = h.derivative(p);
    if (!hp.is_zero()) b.add_product(x_derivative(f, j, generators, jets), hp);
    if (!fp.is_zero()) b.add_product(fp, x_derivative(h, j, generators, jets), Rational(-1));
  }
  return b;
}

Report coisotropy_check(const IdealBasis& ideal, const RelationSet& rs, const JetRules& jets) {
  Report rep;
  rep.name = "Poisson ideal";
  const int g = ideal.genus, lead = 2 * g + 1;
  const int max_index = ideal.max_p_index();
  const auto& gens = rs.generators();
  auto reduced = [&](const MultiPoly& m) { return reduce_partial(m, rs); };
  const MultiPoly C = ideal.curve_poly;

  for (std::size_t k = 0; k < ideal.m_polys.size(); ++k) {
    ++rep.checked;
    const MultiPoly M = reduced(ideal.m_polys[k]);
    const int j = 2 * (g + static_cast<int>(k)) + 1;
    MultiPoly hx = x_derivative(reduced(MultiPoly::var(name_H(j, 1 - 2 * g))), lead, gens, jets);
    MultiPoly B = reduced(poisson_bracket(C, M, g, max_index, gens, jets));
    // Exact identity {C, M_k} = -2 (dh/dx_{2g+1}) C once the flows hold.
    MultiPoly exact = B + Rational(2) * hx * C;
    if (!exact.is_zero()) rep.fail("{C, M_k} + 2 h_x C", {static_cast<int>(k)}, exact.to_string());
    MultiPoly nf = reduce_mod_ideal(B, ideal, rs);
    if (!nf.is_zero()) rep.fail("{C, M_k} in ideal", {static_cast<int>(k)}, nf.to_string());
    if (exact.is_zero() && !(B + hx * C).is_zero())
      rep.notes.push_back("k=" + std::to_string(k) + ": multiplier is -2 dh/dx_" + std::to_string(lead) +
                          "; the printed -dh/dx leaves -(dh/dx) C, which lies in the ideal but is not zero");
  }
  for (std::size_t l = 0; l < ideal.m_polys.size(); ++l)
    for (std::size_t k = l + 1; k < ideal.m_polys.size(); ++k) {
      ++rep.checked;
      MultiPoly B = reduced(poisson_bracket(reduced(ideal.m_polys[l]), reduced(ideal.m_polys[k]), g, max_index, gens, jets));
      MultiPoly nf = reduce_mod_ideal(B, ideal, rs);
      if (!nf.is_zero()) rep.fail("{M_l, M_k}", {static_cast<int>(l), static_cast<int>(k)}, nf.to_string());
    }
  return rep;
}

MultiPoly basis_combination(const std::map<int, MultiPoly>& coeffs) {
  MultiPoly out;
  for (const auto& [l, c] : coeffs) {
    if (l % 2 == 0) out += c * lam_pow(l / 2);
    else out += c * MultiPoly::var(name_p(l));
  }
  return out;
}

MultiPoly poisson_cocycle(const std::map<int, Rational>& alpha, int j, int k, const StructureConstantTable& table,
                          const IdealBasis& ideal, const RelationSet& rs, const JetRules& jets) {
  const int g = ideal.genus;
  auto p_of = [&](int i) { return i % 2 == 0 ? lam_pow(i / 2) : MultiPoly::var(name_p(i)); };
  MultiPoly f = p_of(j) * p_of(k) - basis_combination(table.expansion(j, k));
  MultiPoly a;
  int max_index = 2 * g + 1;
  for (const auto& [i, c] : alpha) {
    if (i % 2 == 0 || i < 2 * g + 1) throw IndexBelowStratum("alpha needs odd indices >= 2g+1");
    a += c * MultiPoly::var(name_p(i));
    max_index = std::max(max_index, i);
  }
  MultiPoly b = poisson_bracket(a, f, g, max_index, rs.generators(), jets);
  return reduce_mod_ideal(b, ideal, rs);
}

}  // namespace birkhoff
