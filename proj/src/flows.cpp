#include "birkhoff/flows.hpp"

#include <algorithm>
#include <cmath>

namespace birkhoff {

MultiPoly HydroSystem::jet(std::size_t i) const { return jet_of(fields.at(i), space_index); }

std::size_t HydroSystem::index_of(VarId field) const {
  auto it = std::find(fields.begin(), fields.end(), field);
  if (it == fields.end()) throw InvalidFlow(name + " has no field " + var_name(field));
  return static_cast<std::size_t>(it - fields.begin());
}

const MultiPoly& HydroSystem::rhs_of(std::string_view field) const { return rhs.at(index_of(var_id(field))); }

MultiPoly jet_of(VarId field, int space_index, int order) {
  std::string n = var_name(field);
  for (int i = 0; i < order; ++i) n = name_jet(n, space_index);
  return MultiPoly::var(n);
}

namespace {

VarId jet_id(VarId field, int space_index, int order) {
  std::string n = var_name(field);
  for (int i = 0; i < order; ++i) n = name_jet(n, space_index);
  return var_id(n);
}

// d/dt of an expression in fields and first jets along system `s`.
MultiPoly time_derivative(const MultiPoly& e, const HydroSystem& s) {
  MultiPoly d;
  for (std::size_t i = 0; i < s.fields.size(); ++i) {
    VarId f = s.fields[i], fx = jet_id(f, s.space_index, 1);
    if (e.mentions(f)) d.add_product(e.derivative(f), s.rhs[i]);
    if (e.mentions(fx)) d.add_product(e.derivative(fx), total_derivative(s.rhs[i], s.fields, s.space_index));
    if (e.mentions(jet_id(f, s.space_index, 2))) throw JetDepthExceeded("second jets in a flow right-hand side");
  }
  return d;
}

std::vector<VarId> generator_ids(int g) {
  std::vector<VarId> ids;
  for (int k = 1 - 2 * g; k <= 2 * g + 1; k += 2) ids.push_back(var_id(name_H(2 * g + 1, k)));
  return ids;
}

std::vector<VarId> u_ids(int g) {
  std::vector<VarId> ids;
  for (int s = 2 * g; s >= 0; --s) ids.push_back(var_id(name_u(s)));
  return ids;
}

MultiPoly U(int s) { return MultiPoly::var(name_u(s)); }

}  // namespace

MultiPoly total_derivative(const MultiPoly& e, const std::vector<VarId>& fields, int space_index) {
  MultiPoly d;
  for (VarId f : fields) {
    VarId fx = jet_id(f, space_index, 1), fxx = jet_id(f, space_index, 2);
    if (e.mentions(fxx)) throw JetDepthExceeded("total derivative of a second jet");
    if (e.mentions(f)) d.add_product(e.derivative(f), MultiPoly::var(fx));
    if (e.mentions(fx)) d.add_product(e.derivative(fx), MultiPoly::var(fxx));
  }
  return d;
}

MultiPoly substitute_fields(const MultiPoly& e, const std::map<VarId, MultiPoly>& old_in_new,
                            const std::vector<VarId>& new_fields, int space_index) {
  std::map<VarId, MultiPoly> sub;
  for (const auto& [f, p] : old_in_new) {
    sub[f] = p;
    VarId fx = jet_id(f, space_index, 1), fxx = jet_id(f, space_index, 2);
    if (e.mentions(fx) || e.mentions(fxx)) {
      MultiPoly px = total_derivative(p, new_fields, space_index);
      if (e.mentions(fx)) sub[fx] = px;
      if (e.mentions(fxx)) sub[fxx] = total_derivative(px, new_fields, space_index);
    }
  }
  return e.substitute(sub);
}

bool is_hydrodynamic(const HydroSystem& s) {
  std::vector<VarId> jets;
  for (VarId f : s.fields) jets.push_back(jet_id(f, s.space_index, 1));
  for (const auto& r : s.rhs)
    for (const auto& t : r.terms()) {
      int count = 0;
      for (const auto& [v, e] : t.mono.factors())
        if (std::find(jets.begin(), jets.end(), v) != jets.end()) count += static_cast<int>(e);
      if (count != 1) return false;
    }
  return true;
}

HydroSystem change_variables(const HydroSystem& s, const std::vector<VarId>& new_fields,
                             const std::map<VarId, MultiPoly>& new_in_old,
                             const std::map<VarId, MultiPoly>& old_in_new, std::string name) {
  HydroSystem out{std::move(name), s.time_label, s.space_index, new_fields, {}};
  for (VarId nf : new_fields) {
    const MultiPoly& N = new_in_old.at(nf);
    MultiPoly r;
    for (std::size_t i = 0; i < s.fields.size(); ++i)
      if (N.mentions(s.fields[i])) r.add_product(N.derivative(s.fields[i]), s.rhs[i]);
    out.rhs.push_back(substitute_fields(r, old_in_new, new_fields, s.space_index));
  }
  return out;
}

HydroSystem reverse_time(const HydroSystem& s, std::string label) {
  HydroSystem out = s;
  out.time_label = std::move(label);
  for (auto& r : out.rhs) r = -r;
  return out;
}

// ------------------------------------------------------- derived systems

std::vector<MultiPoly> conservation_fluxes(int g, const RelationSet& rs, int time_index) {
  const int lead = 2 * g + 1;
  if (time_index < lead || time_index % 2 == 0)
    throw InvalidFlow("time index must be odd and >= 2g+1, got " + std::to_string(time_index));
  std::vector<MultiPoly> flux;
  for (int k = 1 - 2 * g; k <= lead; k += 2) {
    try {
      flux.push_back(reduce(MultiPoly::var(name_H(time_index, k)), rs));
    } catch (const UnknownVariable&) {
      throw InvalidFlow(name_H(time_index, k) + " is outside the derived window");
    }
  }
  return flux;
}

HydroSystem generator_flow(int g, const RelationSet& rs, int time_index) {
  const int lead = 2 * g + 1;
  HydroSystem s{"generator flow", "x" + std::to_string(time_index), lead, generator_ids(g), {}};
  for (const auto& f : conservation_fluxes(g, rs, time_index)) s.rhs.push_back(total_derivative(f, s.fields, lead));
  return s;
}

JetRules generator_jet_rules(int g, const RelationSet& rs, int max_time) {
  JetRules rules;
  for (int t = 2 * g + 3; t <= max_time; t += 2) {
    HydroSystem s = generator_flow(g, rs, t);
    for (std::size_t i = 0; i < s.fields.size(); ++i) rules[{s.fields[i], t}] = s.rhs[i];
  }
  return rules;
}

std::map<VarId, MultiPoly> curve_in_generators(int g) {
  auto c = curve_symbolic(g);
  std::map<VarId, MultiPoly> m;
  for (int s = 0; s <= 2 * g; ++s) m[var_id(name_u(s))] = c.u[static_cast<std::size_t>(s)];
  return m;
}

std::map<VarId, MultiPoly> generators_in_curve(int g) {
  // u[s] = 2 H[2g+1][2(g-s)+1] + (products of lower-index generators), so the
  // generators are solved in increasing lower index from u[2g] down to u[0].
  auto c = curve_symbolic(g);
  std::map<VarId, MultiPoly> sol;
  for (int s = 2 * g; s >= 0; --s) {
    VarId h = var_id(name_H(2 * g + 1, 2 * (g - s) + 1));
    MultiPoly quad = c.u[static_cast<std::size_t>(s)] - Rational(2) * MultiPoly::var(h);
    sol[h] = (U(s) - quad.substitute(sol)) * Rational(1, 2);
  }
  return sol;
}

HydroSystem derive_dckdv(int g, const RelationSet& rs, int flow_index) {
  if (g < 1 || flow_index < 1 || flow_index > 2 * g)
    throw InvalidFlow("dcKdV flows need g >= 1 and flow index in 1..2g");
  HydroSystem gen = generator_flow(g, rs, 2 * g + 1 + 2 * flow_index);
  return change_variables(gen, u_ids(g), curve_in_generators(g), generators_in_curve(g),
                          "dcKdV g=" + std::to_string(g) + " " + gen.time_label);
}

Rational bh_coefficient(int k) { return Rational(1L << k) * Rational(k) * Rational(2 * k - 1) * binomial_half(k); }

std::vector<HydroSystem> derive_bh_hierarchy(const RelationSet& rs0, int kmax) {
  std::vector<HydroSystem> out;
  for (int k = 1; k <= kmax; ++k) {
    HydroSystem s = generator_flow(0, rs0, 2 * k - 1);
    s.name = "BH k=" + std::to_string(k);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<MultiPoly> commutativity_residual(const HydroSystem& a, const HydroSystem& b) {
  if (a.fields != b.fields || a.space_index != b.space_index)
    throw InvalidFlow("commutativity needs shared fields and space variable");
  std::vector<MultiPoly> res;
  for (std::size_t i = 0; i < a.fields.size(); ++i)
    res.push_back(time_derivative(a.rhs[i], b) - time_derivative(b.rhs[i], a));
  return res;
}

Report commutativity_check(const HydroSystem& a, const HydroSystem& b) {
  Report rep;
  rep.name = "commutativity " + a.time_label + "/" + b.time_label;
  auto res = commutativity_residual(a, b);
  for (std::size_t i = 0; i < res.size(); ++i) {
    ++rep.checked;
    if (!res[i].is_zero()) rep.fail("cross derivative of " + var_name(a.fields[i]), {static_cast<int>(i)}, res[i].to_string());
  }
  return rep;
}

// ------------------------------------------------------------ genus one

namespace {

const std::vector<VarId>& moduli_fields() {
  static const std::vector<VarId> f{var_id("g2"), var_id("g3"), var_id(name_u(2))};
  return f;
}

std::map<VarId, MultiPoly> moduli_in_u() {
  MultiPoly u0 = U(0), u1 = U(1), u2 = U(2);
  return {{var_id("g2"), u1 - u2 * u2 * Rational(1, 3)},
          {var_id("g3"), u0 + Rational(2, 27) * u2.pow(3) - Rational(1, 3) * u1 * u2},
          {var_id(name_u(2)), u2}};
}

std::map<VarId, MultiPoly> u_in_moduli() {
  MultiPoly g2 = MultiPoly::var("g2"), g3 = MultiPoly::var("g3"), u2 = U(2);
  MultiPoly u1 = g2 + Rational(1, 3) * u2 * u2;
  return {{var_id(name_u(2)), u2}, {var_id(name_u(1)), u1}, {var_id(name_u(0)), g3 - Rational(2, 27) * u2.pow(3) + Rational(1, 3) * u1 * u2}};
}

}  // namespace

HydroSystem moduli_flow_g1(const RelationSet& rs1, int time_index) {
  HydroSystem u = derive_dckdv(1, rs1, (time_index - 3) / 2);
  return change_variables(u, moduli_fields(), moduli_in_u(), u_in_moduli(), "moduli " + u.time_label);
}

HydroSystem moduli_flow_S_g1(const RelationSet& rs1, int time_index) {
  HydroSystem m = moduli_flow_g1(rs1, time_index);
  const VarId S = var_id("S");
  const MultiPoly Sx = jet_of(S, 3, 1), Sxx = jet_of(S, 3, 2);
  std::map<VarId, MultiPoly> u2_sub{{var_id(name_u(2)), Rational(2) * Sx}, {jet_id(var_id(name_u(2)), 3, 1), Rational(2) * Sxx}};

  // Generators in terms of (g2, g3, S_x): through u and then the moduli.
  std::map<VarId, MultiPoly> gens;
  for (const auto& [h, p] : generators_in_curve(1)) gens[h] = p.substitute(u_in_moduli()).substitute(u2_sub);
  MultiPoly s_rhs = reduce(MultiPoly::var(name_H(time_index, -1)), rs1).substitute(gens);

  HydroSystem out{"moduli S-form " + m.time_label, m.time_label, 3, {var_id("g2"), var_id("g3"), S}, {}};
  out.rhs.push_back(m.rhs[0].substitute(u2_sub));
  out.rhs.push_back(m.rhs[1].substitute(u2_sub));
  out.rhs.push_back(s_rhs);
  return out;
}

MultiPoly discriminant_flow_g1(const RelationSet& rs1, int time_index) {
  HydroSystem m = moduli_flow_g1(rs1, time_index);
  MultiPoly g2 = MultiPoly::var("g2"), g3 = MultiPoly::var("g3");
  MultiPoly delta = Rational(-16) * (Rational(4) * g2.pow(3) + Rational(27) * g3 * g3);
  return delta.derivative(var_id("g2")) * m.rhs[0] + delta.derivative(var_id("g3")) * m.rhs[1];
}

HydroSystem constrained_flow_g1(const RelationSet& rs1, MultiPoly* invariance) {
  HydroSystem u = derive_dckdv(1, rs1, 1);
  const VarId u0 = var_id(name_u(0));
  std::map<VarId, MultiPoly> zero{{u0, MultiPoly()}, {jet_id(u0, 3, 1), MultiPoly()}};
  if (invariance) *invariance = u.rhs[u.index_of(u0)].substitute(zero);
  HydroSystem out{"u0=0 flow", u.time_label, 3, {var_id(name_u(2)), var_id(name_u(1))}, {}};
  for (VarId f : out.fields) out.rhs.push_back(u.rhs[u.index_of(f)].substitute(zero));
  return out;
}

HydroSystem benney_system(const RelationSet& rs1) {
  HydroSystem c = constrained_flow_g1(rs1);
  MultiPoly u = MultiPoly::var("u"), v = MultiPoly::var("v");
  std::map<VarId, MultiPoly> new_in_old{{var_id("u"), -U(2)}, {var_id("v"), -U(1) + Rational(1, 4) * U(2) * U(2)}};
  std::map<VarId, MultiPoly> old_in_new{{var_id(name_u(2)), -u}, {var_id(name_u(1)), Rational(1, 4) * u * u - v}};
  return reverse_time(change_variables(c, {var_id("u"), var_id("v")}, new_in_old, old_in_new, "Benney"), "t");
}

HydroSystem constrained_moduli_flow(const RelationSet& rs1) {
  HydroSystem c = constrained_flow_g1(rs1);
  std::map<VarId, MultiPoly> new_in_old{{var_id("g2"), U(1) - Rational(1, 3) * U(2) * U(2)}, {var_id(name_u(2)), U(2)}};
  std::map<VarId, MultiPoly> old_in_new{{var_id(name_u(2)), U(2)},
                                        {var_id(name_u(1)), MultiPoly::var("g2") + Rational(1, 3) * U(2) * U(2)}};
  return change_variables(c, {var_id("g2"), var_id(name_u(2))}, new_in_old, old_in_new, "u0=0 moduli flow");
}

MultiPoly discriminant_flow_constrained(const RelationSet& rs1) {
  HydroSystem m = constrained_moduli_flow(rs1);
  MultiPoly u2 = U(2), u1 = MultiPoly::var("g2") + Rational(1, 3) * u2 * u2;
  MultiPoly delta = Rational(16) * u1 * u1 * (u2 * u2 - Rational(4) * u1);
  return delta.derivative(var_id("g2")) * m.rhs[0] + delta.derivative(var_id(name_u(2))) * m.rhs[1];
}

DiagonalSystem riemann_system_g1() {
  DiagonalSystem d{"Riemann invariants g=1", "x5", {}, {}};
  MultiPoly sum;
  for (int i = 1; i <= 3; ++i) {
    d.invariants.push_back(var_id("gamma[" + std::to_string(i) + "]"));
    sum += MultiPoly::var(d.invariants.back());
  }
  for (VarId gi : d.invariants) d.speeds.push_back(Rational(1, 2) * (sum + Rational(2) * MultiPoly::var(gi)));
  return d;
}

std::map<VarId, MultiPoly> curve_in_roots_g1() {
  MultiPoly a = MultiPoly::var("gamma[1]"), b = MultiPoly::var("gamma[2]"), c = MultiPoly::var("gamma[3]");
  return {{var_id(name_u(2)), -(a + b + c)}, {var_id(name_u(1)), a * b + a * c + b * c}, {var_id(name_u(0)), -(a * b * c)}};
}

std::vector<MultiPoly> riemann_consistency_g1(const RelationSet& rs1) {
  DiagonalSystem d = riemann_system_g1();
  HydroSystem u = derive_dckdv(1, rs1, 1);
  auto roots = curve_in_roots_g1();
  std::vector<MultiPoly> res;
  for (std::size_t s = 0; s < u.fields.size(); ++s) {
    const MultiPoly& us = roots.at(u.fields[s]);
    MultiPoly lhs;
    for (std::size_t i = 0; i < d.invariants.size(); ++i)
      lhs.add_product(us.derivative(d.invariants[i]), d.speeds[i] * jet_of(d.invariants[i], 3));
    res.push_back(lhs - substitute_fields(u.rhs[s], roots, d.invariants, 3));
  }
  return res;
}

std::array<double, 3> cubic_roots_desc(double u0, double u1, double u2) {
  // lam = t - u2/3 gives t^3 + p t + q with p = g2, q = g3.
  const double p = u1 - u2 * u2 / 3.0;
  const double q = u0 + 2.0 * u2 * u2 * u2 / 27.0 - u1 * u2 / 3.0;
  const double shift = -u2 / 3.0;
  const double disc = -(4.0 * p * p * p + 27.0 * q * q);
  const double scale = std::max({std::abs(p * p * p), q * q, 1e-300});
  if (disc < -1e-12 * scale) throw ComplexRoots("cubic has a complex pair (discriminant " + std::to_string(disc) + ")");
  std::array<double, 3> r{};
  if (p >= 0.0) {
    r = {shift, shift, shift};
  } else {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    double arg = 3.0 * q / (p * m);
    arg = std::clamp(arg, -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) r[static_cast<std::size_t>(k)] = shift + m * std::cos(theta - 2.0 * M_PI * k / 3.0);
  }
  std::sort(r.begin(), r.end(), std::greater<double>());
  return r;
}

std::array<double, 3> riemann_speeds_g1(const std::array<double, 3>& gamma) {
  const double s = gamma[0] + gamma[1] + gamma[2];
  return {0.5 * (s + 2.0 * gamma[0]), 0.5 * (s + 2.0 * gamma[1]), 0.5 * (s + 2.0 * gamma[2])};
}

std::array<double, 3> curve_from_roots(const std::array<double, 3>& g) {
  return {-g[0] * g[1] * g[2], g[0] * g[1] + g[0] * g[2] + g[1] * g[2], -(g[0] + g[1] + g[2])};
}

}  // namespace birkhoff
