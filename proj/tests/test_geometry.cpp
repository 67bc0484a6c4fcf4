#include <random>

#include "birkhoff/errors.hpp"
#include "birkhoff/flows.hpp"
#include "birkhoff/geometry.hpp"
#include "birkhoff/strata.hpp"
#include "doctest.h"

using namespace birkhoff;

namespace {

MultiPoly P(const std::string& s) { return MultiPoly::parse(s); }

const RelationSet& relations(int g) {
  static std::map<int, RelationSet> cache;
  auto it = cache.find(g);
  if (it == cache.end()) it = cache.emplace(g, derive_relations(StratumSpec::with_window(g, 13))).first;
  return it->second;
}

using Mat3 = std::array<std::array<Rational, 3>, 3>;

Mat3 inverse3(const Mat3& m) {
  Rational det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                 m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  Mat3 inv;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
    }
  return inv;
}

// The W_1c chart y -> (y, H5[-1](y), H5[1](y), H5[3](y)) in R^6, built from
// the derived relations. Metric, determinant and Gauss-equation curvature are
// computed from it in exact arithmetic.
struct Immersion {
  std::vector<VarId> y{var_id("H[3][-1]"), var_id("H[3][1]"), var_id("H[3][3]")};
  std::vector<MultiPoly> F;  // the three extra coordinates
  Immersion() {
    for (int k : {-1, 1, 3}) F.push_back(reduce(P(name_H(5, k)), relations(1)));
  }

  struct At {
    Mat3 g;
    Rational det;
    Rational R[3][3][3][3];
  };

  At at(const Rational& a, const Rational& b, const Rational& c) const {
    std::map<VarId, Rational> pt{{y[0], a}, {y[1], b}, {y[2], c}};
    auto ev = [&](const MultiPoly& p) { return p.evaluate<Rational>([&](VarId v) { return pt.at(v); }); };
    using Vec6 = std::array<Rational, 6>;
    Vec6 t[3];
    Vec6 second[3][3];
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) t[i][k] = Rational(i == k ? 1 : 0);
      for (int k = 0; k < 3; ++k) t[i][3 + k] = ev(F[k].derivative(y[i]));
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 6; ++k) second[i][j][k] = k < 3 ? Rational(0) : ev(F[k - 3].derivative(y[i]).derivative(y[j]));
    }
    auto dot = [](const Vec6& u, const Vec6& v) {
      Rational s(0);
      for (int k = 0; k < 6; ++k) s = s + u[k] * v[k];
      return s;
    };
    At r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.g[i][j] = dot(t[i], t[j]);
    r.det = r.g[0][0] * (r.g[1][1] * r.g[2][2] - r.g[1][2] * r.g[2][1]) -
            r.g[0][1] * (r.g[1][0] * r.g[2][2] - r.g[1][2] * r.g[2][0]) +
            r.g[0][2] * (r.g[1][0] * r.g[2][1] - r.g[1][1] * r.g[2][0]);
    Mat3 gi = inverse3(r.g);
    Vec6 h[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Vec6 v = second[i][j];
        Rational c[3];
        for (int a2 = 0; a2 < 3; ++a2) {
          c[a2] = Rational(0);
          for (int b2 = 0; b2 < 3; ++b2) c[a2] = c[a2] + gi[a2][b2] * dot(t[b2], second[i][j]);
        }
        for (int a2 = 0; a2 < 3; ++a2)
          for (int k = 0; k < 6; ++k) v[k] = v[k] - c[a2] * t[a2][k];
        h[i][j] = v;
      }
    for (int a2 = 0; a2 < 3; ++a2)
      for (int b2 = 0; b2 < 3; ++b2)
        for (int c2 = 0; c2 < 3; ++c2)
          for (int d2 = 0; d2 < 3; ++d2) r.R[a2][b2][c2][d2] = dot(h[a2][c2], h[b2][d2]) - dot(h[a2][d2], h[b2][c2]);
    return r;
  }
};

std::vector<MultiPoly> u_symbols() { return {P("u[0]"), P("u[1]"), P("u[2]")}; }

}  // namespace

TEST_CASE("curve coefficients from generators") {
  auto c = curve_from_H<Rational>(1, {Rational(1), Rational(2), Rational(3)});
  CHECK(c.u[2] == Rational(2));
  CHECK(c.u[1] == Rational(5));
  CHECK(c.u[0] == Rational(10));
  for (int g = 0; g <= 3; ++g) {
    auto z = curve_from_H<Rational>(g, std::vector<Rational>(2 * g + 1, Rational(0)));
    for (const auto& u : z.u) CHECK(u.is_zero());
  }
  auto s1 = curve_symbolic(1);
  CHECK(s1.u[1] == P("2*H[3][1] + H[3][-1]^2"));
  CHECK(s1.u[0] == P("2*H[3][3] + 2*H[3][-1]*H[3][1]"));
  CHECK_THROWS_AS(curve_from_H<Rational>(1, {Rational(1)}), Error);
}

TEST_CASE("curve coefficients match the squared series") {
  for (int g = 0; g <= 3; ++g) {
    StratumSpec s = StratumSpec::with_window(g, 2 * g + 7);
    RelationSet rs = derive_relations(s);
    auto basis = basis_series(s);
    LaurentSeries sq = basis.at(2 * g + 1) * basis.at(2 * g + 1);
    auto c = curve_symbolic(g);
    CAPTURE(g);
    CHECK(sq.coeff(4 * g + 2) == P("1"));
    for (int k = 0; k <= 2 * g; ++k) CHECK(reduce(sq.coeff(2 * k), rs) == c.u[k]);
    for (int e = 1; e < 4 * g + 2; e += 2) CHECK(sq.coeff(e).is_zero());
  }
}

TEST_CASE("elliptic moduli and discriminant") {
  auto u = u_symbols();
  auto m = moduli_and_discriminant(CurveCoeffs<MultiPoly>{1, u});
  CHECK(m.g2 == P("u[1] - 1/3*u[2]^2"));
  CHECK(m.g3 == P("u[0] + 2/27*u[2]^3 - 1/3*u[1]*u[2]"));
  // oracle: 16 times the textbook discriminant b^2c^2 - 4c^3 - 4b^3d - 27d^2 + 18bcd
  MultiPoly b = u[2], cc = u[1], d = u[0];
  MultiPoly disc = b * b * cc * cc - Rational(4) * cc.pow(3) - Rational(4) * b.pow(3) * d - Rational(27) * d * d +
                   Rational(18) * b * cc * d;
  CHECK(m.discriminant == Rational(16) * disc);
  CHECK((m.discriminant - m.standard_form).is_zero());
  CHECK_FALSE((m.discriminant - m.printed_form).is_zero());
  CHECK(m.discriminant - m.printed_form == Rational(-32) * m.g2.pow(3));

  auto m0 = moduli_and_discriminant(CurveCoeffs<MultiPoly>{1, {MultiPoly(), u[1], u[2]}});
  CHECK(m0.discriminant == m0.reduced_form);
  auto m1 = moduli_and_discriminant(CurveCoeffs<MultiPoly>{1, {MultiPoly(), u[1], MultiPoly()}});
  CHECK(m1.discriminant == P("-64*u[1]^3"));
  CHECK(m1.reduced_form == P("-64*u[1]^3"));

  auto z = moduli_and_discriminant(CurveCoeffs<Rational>{1, {Rational(0), Rational(0), Rational(0)}});
  CHECK(z.g2.is_zero());
  CHECK(z.g3.is_zero());
  CHECK(z.discriminant.is_zero());
  // (lam-1)(lam-2)(lam-3): disc = 4, times 16
  auto r = moduli_and_discriminant(CurveCoeffs<Rational>{1, {Rational(-6), Rational(11), Rational(-6)}});
  CHECK(r.discriminant == Rational(64));
}

TEST_CASE("W1c curvature at the origin") {
  auto w = metric_and_curvature_W1c(Rational(0), Rational(0), Rational(0));
  CHECK(w.D == Rational(4));
  CHECK(w.R1212 == Rational(-1, 2));
  CHECK(w.R1213 == Rational(0));
  CHECK(w.R1223 == Rational(-2));
  CHECK(w.R1313 == Rational(-4));
  CHECK(w.metric(0, 0) == Rational(1));
  CHECK(w.metric(1, 1) == Rational(2));
  CHECK(w.metric(2, 2) == Rational(2));
  CHECK(w.metric(0, 1) == Rational(0));
}

TEST_CASE("W1c metric and curvature against the immersion") {
  Immersion im;
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> num(-6, 6), den(1, 5);
  for (int trial = 0; trial < 12; ++trial) {
    Rational a(num(rng), den(rng)), b(num(rng), den(rng)), c(num(rng), den(rng));
    if (trial == 0) a = b = c = Rational(0);
    CAPTURE(a.to_string());
    CAPTURE(b.to_string());
    CAPTURE(c.to_string());
    auto w = metric_and_curvature_W1c(a, b, c);
    auto o = im.at(a, b, c);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(w.metric(i, j) == o.g[i][j]);
    CHECK(w.D == o.det);
    CHECK(w.R1212 == o.R[0][1][0][1]);
    CHECK(w.R1213 == o.R[0][1][0][2]);
    CHECK(w.R1223 == o.R[0][1][1][2]);
    CHECK(w.R1313 == o.R[0][2][0][2]);
    CHECK(o.R[1][2][1][2].is_zero());
    CHECK(o.R[0][2][1][2].is_zero());
  }
}

TEST_CASE("curvature denominator is positive on the lattice") {
  int checked = 0;
  for (int i = -5; i <= 5; ++i)
    for (int j = -5; j <= 5; ++j)
      for (int k = -5; k <= 5; ++k) {
        auto w = metric_and_curvature_W1c(Rational(i, 10), Rational(j, 10), Rational(k, 10));
        CHECK(w.D.sign() > 0);
        ++checked;
      }
  CHECK(checked == 1331);
  auto f = metric_and_curvature_W1c(0.1, -0.2, 0.3);
  CHECK(f.D > 0.0);
  CHECK(f.metric(0, 1) == doctest::Approx(f.metric(1, 0)));
}

TEST_CASE("ideal basis") {
  auto b = ideal_basis(1, 3);
  CHECK(b.m_polys[0] == P("p[5] - lam*p[3] + H[3][-1]*p[3]"));
  CHECK(b.curve_poly == P("p[3]^2 - lam^3 - 2*H[3][-1]*lam^2 - (2*H[3][1] + H[3][-1]^2)*lam - 2*H[3][3] - 2*H[3][-1]*H[3][1]"));
  CHECK(ideal_basis(1, 0).m_polys.empty());
  CHECK(ideal_basis(2, 1).m_polys[0] == P("p[7] - lam*p[5] + H[5][-3]*p[5]"));
  const RelationSet& rs = relations(1);
  CHECK(reduce_mod_ideal(b.curve_poly, b, rs).is_zero());
  for (const auto& m : b.m_polys) CHECK(reduce_mod_ideal(m, b, rs).is_zero());
  CHECK(reduce_mod_ideal(P("p[4]*p[3]"), b, rs) == P("lam^2*p[3]"));
  CHECK(ideal_alpha(b, rs, 7) == P("lam^2 - H[3][-1]*lam - H[3][1] + H[3][-1]^2"));
  CHECK_THROWS_AS(ideal_alpha(b, rs, 1), IndexBelowStratum);
  CHECK_THROWS_AS(ideal_alpha(b, rs, 11), WindowExceeded);
}

TEST_CASE("l relations lie in the ideal") {
  for (int g = 0; g <= 2; ++g) {
    auto b = ideal_basis(g, 4);
    StratumSpec s = StratumSpec::with_window(g, 13);
    Report rep = verify_l_relations(b, relations(g), s);
    CAPTURE(g);
    CHECK(rep.ok());
    CHECK(rep.checked == 4);
  }
}

TEST_CASE("bracket basics") {
  const RelationSet& rs = relations(1);
  auto gens = rs.generators();
  MultiPoly f = P("p[5]*H[3][-1] + lam*p[3]^2");
  CHECK(poisson_bracket(f, f, 1, 7, gens, {}).is_zero());
  MultiPoly h = P("p[3]*H[3][1]");
  CHECK(poisson_bracket(f, h, 1, 7, gens, {}) == -poisson_bracket(h, f, 1, 7, gens, {}));
  CHECK(poisson_bracket(P("lam"), h, 1, 7, gens, {}).is_zero());
}

TEST_CASE("Poisson ideal for genus one") {
  const RelationSet& rs = relations(1);
  auto b = ideal_basis(1, 2);
  Report free = coisotropy_check(b, rs, {});
  CHECK_FALSE(free.ok());
  bool m01_fails = false;
  for (const auto& e : free.failures) m01_fails |= e.identity == "{M_l, M_k}";
  CHECK(m01_fails);

  JetRules jets = generator_jet_rules(1, rs, b.max_p_index());
  Report on_shell = coisotropy_check(b, rs, jets);
  CHECK(on_shell.ok());
  CHECK(on_shell.checked == 3);
  CHECK(!on_shell.notes.empty());
}

TEST_CASE("Poisson ideal for genus zero and two") {
  for (int g : {0, 2}) {
    const RelationSet& rs = relations(g);
    auto b = ideal_basis(g, 3);
    Report rep = coisotropy_check(b, rs, generator_jet_rules(g, rs, b.max_p_index()));
    CAPTURE(g);
    CHECK(rep.ok());
    CHECK(rep.checked == 6);
  }
}
