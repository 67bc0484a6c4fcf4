#pragma once

#include <map>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "birkhoff/errors.hpp"
#include "birkhoff/relation_set.hpp"
#include "birkhoff/report.hpp"
#include "birkhoff/strata.hpp"

namespace birkhoff {

// ------------------------------------------------------------------ curve

// Monic hyperelliptic curve p^2 = lam^{2g+1} + sum_k u[k] lam^k.
template <typename Scalar>
struct CurveCoeffs {
  int genus = 0;
  std::vector<Scalar> u;  // u[0] .. u[2g]
};

// `h[i]` is H[2g+1][1-2g+2i], i = 0..2g (the generators in order).
template <typename Scalar>
CurveCoeffs<Scalar> curve_from_H(int g, const std::vector<Scalar>& h) {
  if (static_cast<int>(h.size()) != 2 * g + 1) throw Error("curve_from_H: need 2g+1 generator values");
  auto H = [&](int k) -> const Scalar& { return h[static_cast<std::size_t>((k - (1 - 2 * g)) / 2)]; };
  CurveCoeffs<Scalar> c{g, std::vector<Scalar>(2 * g + 1, Scalar(0))};
  for (int s = 0; s <= 2 * g; ++s) c.u[s] = c.u[s] + Scalar(2) * H(2 * (g - s) + 1);
  for (int k = -g; k <= g + 1; ++k)
    for (int s = 0; s <= g - k - 1; ++s) c.u[s] = c.u[s] + H(2 * k + 1) * H(-2 * (s + k) - 1);
  return c;
}

// The generator symbols of genus g as polynomials, in curve_from_H order.
std::vector<MultiPoly> generator_symbols(int g);
CurveCoeffs<MultiPoly> curve_symbolic(int g);

// --------------------------------------------------------------- moduli

template <typename Scalar>
struct EllipticModuli {
  Scalar g2, g3;
  Scalar discriminant;       // 16 * disc(lam^3 + u2 lam^2 + u1 lam + u0), via resultant
  Scalar standard_form;      // -16 (4 g2^3 + 27 g3^2)
  Scalar printed_form;       // -16 (2 g2^3 + 27 g3^2), as printed for the elliptic case
  Scalar reduced_form;       // 16 u1^2 (u2^2 - 4 u1), valid when u0 = 0
};

namespace detail {

template <typename Scalar>
Scalar det_cofactor(const std::vector<std::vector<Scalar>>& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  Scalar acc(0);
  for (std::size_t c = 0; c < n; ++c) {
    if (m[0][c] == Scalar(0)) continue;
    std::vector<std::vector<Scalar>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<Scalar> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(m[r][k]);
      minor.push_back(std::move(row));
    }
    Scalar term = m[0][c] * det_cofactor(minor);
    acc = (c % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

}  // namespace detail

// Res(P, P') from the 5x5 Sylvester matrix of a monic cubic.
template <typename Scalar>
Scalar cubic_resultant(const Scalar& u0, const Scalar& u1, const Scalar& u2) {
  const Scalar z(0), one(1);
  std::vector<std::vector<Scalar>> s = {
      {one, u2, u1, u0, z},
      {z, one, u2, u1, u0},
      {Scalar(3), Scalar(2) * u2, u1, z, z},
      {z, Scalar(3), Scalar(2) * u2, u1, z},
      {z, z, Scalar(3), Scalar(2) * u2, u1},
  };
  return detail::det_cofactor(s);
}

template <typename Scalar>
EllipticModuli<Scalar> moduli_and_discriminant(const CurveCoeffs<Scalar>& c) {
  if (c.genus != 1 || c.u.size() != 3) throw Error("moduli_and_discriminant: genus one only");
  const Scalar &u0 = c.u[0], &u1 = c.u[1], &u2 = c.u[2];
  EllipticModuli<Scalar> m;
  const Scalar three(3), nine27(27);
  m.g2 = u1 - u2 * u2 / three;
  m.g3 = u0 + Scalar(2) * u2 * u2 * u2 / nine27 - u1 * u2 / three;
  // For a monic cubic the discriminant is -Res(P, P').
  m.discriminant = Scalar(-16) * cubic_resultant(u0, u1, u2);
  const Scalar g2c = m.g2 * m.g2 * m.g2, g3s = m.g3 * m.g3;
  m.standard_form = Scalar(-16) * (Scalar(4) * g2c + nine27 * g3s);
  m.printed_form = Scalar(-16) * (Scalar(2) * g2c + nine27 * g3s);
  m.reduced_form = Scalar(16) * u1 * u1 * (u2 * u2 - Scalar(4) * u1);
  return m;
}

// ------------------------------------------------------ metric on W_1c

template <typename Scalar>
struct W1cGeometry {
  Eigen::Matrix<Scalar, 3, 3> metric;
  Scalar R1212, R1213, R1223, R1313;
  Scalar D;
};

// Induced metric and curvature in the coordinates y = (H[3][-1], H[3][1], H[3][3]).
template <typename Scalar>
W1cGeometry<Scalar> metric_and_curvature_W1c(const Scalar& y1, const Scalar& y2, const Scalar& y3) {
  using S = Scalar;
  W1cGeometry<S> w;
  auto& g = w.metric;
  g(0, 0) = S(1) + S(4) * y1 * y1 + y2 * y2 + S(4) * y3 * y3;
  g(1, 1) = S(2) + y1 * y1 + y2 * y2;
  g(2, 2) = S(2) + S(4) * y1 * y1;
  g(0, 1) = g(1, 0) = S(-2) * y1 + y1 * y2 + S(2) * y2 * y3;
  g(0, 2) = g(2, 0) = -y2 + S(4) * y1 * y3;
  g(1, 2) = g(2, 1) = -y1 + S(2) * y1 * y2;

  const S y1_2 = y1 * y1, y1_3 = y1_2 * y1, y1_4 = y1_2 * y1_2, y2_2 = y2 * y2;
  w.D = S(4) + S(4) * y2_2 + S(17) * y1_2 - S(4) * y1 * y2_2 * y3 + S(32) * y1 * y2 * y3 + S(16) * y3 * y3 +
        y2_2 * y2_2 + S(24) * y1_2 * y2_2 + S(8) * y1_2 * y2 + S(32) * y1_4 * y2 + S(16) * y1_4 * y1_2 +
        S(4) * y3 * y3 * y1_2 + S(24) * y1_4 + S(16) * y1_3 * y3;
  if (w.D == S(0)) throw DegenerateMetric("curvature denominator vanishes");

  w.R1212 = (S(-2) - y2_2 - S(16) * y1 * y3 + S(4) * y2 - S(8) * y1_2 - S(12) * y1 * y2 * y3 - S(8) * y3 * y3 -
             S(8) * y1_2 * y2 - S(16) * y1_4 - S(8) * y1_3 * y3 + S(2) * y2_2 * y2) /
            w.D;
  w.R1213 = (S(2) * y1 * y2 - S(8) * y1 + S(8) * y2 * y3 + S(8) * y1_2 * y3 + S(4) * y1 * y2_2 - S(16) * y1_3 +
             S(8) * y1_3 * y2) /
            w.D;
  w.R1223 = (S(-8) - S(18) * y1_2 - S(8) * y1_4 - S(4) * y2_2 - S(8) * y1_2 * y2) / w.D;
  w.R1313 = (S(-16) - S(8) * y2_2 - S(36) * y1_2 - S(16) * y1_2 * y2 - S(16) * y1_4) / w.D;
  return w;
}

// ----------------------------------------------------------------- ideal

// C_{2g+1} and M_k = p[2(g+k)+3] - lam p[2(g+k)+1] + H[2(g+k)+1][1-2g] p[2g+1],
// k = 0 .. count-1. The curve is written in the generators.
struct IdealBasis {
  int genus = 0;
  MultiPoly curve_poly;
  std::vector<MultiPoly> m_polys;
  // Highest odd p index that the basis can rewrite.
  int max_p_index() const { return 2 * genus + 1 + 2 * static_cast<int>(m_polys.size()); }
};

IdealBasis ideal_basis(int g, int count);

// Normal form a(lam) + b(lam) p[2g+1] modulo the ideal, with H symbols
// reduced by `rs`. Other symbols pass through unchanged.
MultiPoly reduce_mod_ideal(const MultiPoly& f, const IdealBasis& ideal, const RelationSet& rs);

// alpha_m(lam) with p[2m+1] = alpha_m(lam) p[2g+1] in the ideal, reduced.
MultiPoly ideal_alpha(const IdealBasis& ideal, const RelationSet& rs, int odd_index);

// Every l relation p_{2m+1} - alpha_m(lam) p_{2g+1}, with alpha_m obtained by
// dividing the series, reduces to zero modulo the ideal.
Report verify_l_relations(const IdealBasis& ideal, const RelationSet& rs, const StratumSpec& spec);

// ------------------------------------------------------- Poisson structure

// d(generator)/dx[j] as a polynomial in generators and their x_{2g+1} jets.
using JetRules = std::map<std::pair<VarId, int>, MultiPoly>;

// The x dependence of a polynomial enters through the generators only;
// p symbols and lam are independent coordinates.
MultiPoly x_derivative(const MultiPoly& f, int j, const std::vector<VarId>& generators, const JetRules& jets);

// Canonical bracket over the pairs (x_j, p_j), j odd in [2g+1, max_index].
MultiPoly poisson_bracket(const MultiPoly& f, const MultiPoly& h, int genus, int max_index,
                          const std::vector<VarId>& generators, const JetRules& jets);

// Jets missing from `jets` stay free symbols, so an empty rule set shows
// which identities need the flow equations.
Report coisotropy_check(const IdealBasis& ideal, const RelationSet& rs, const JetRules& jets);

// psi(p_j, p_k) = {alpha, f_jk} restricted to the variety, alpha = sum_i
// alpha_i p_i over odd i >= 2g+1, f_jk = p_j p_k - sum_l C^l_jk p_l.
MultiPoly poisson_cocycle(const std::map<int, Rational>& alpha, int j, int k, const StructureConstantTable& table,
                          const IdealBasis& ideal, const RelationSet& rs, const JetRules& jets);

// p-symbol form of sum_l c_l p_l, with p[2m] written as lam^m.
MultiPoly basis_combination(const std::map<int, MultiPoly>& coeffs);

}  // namespace birkhoff
