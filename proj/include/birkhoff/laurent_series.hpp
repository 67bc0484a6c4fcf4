#pragma once

#include <climits>
#include <functional>
#include <map>
#include <string>

#include "birkhoff/multipoly.hpp"

namespace birkhoff {

// Truncated Laurent series in z with polynomial coefficients.
//
// Coefficients are known exactly for exponents in [floor(), top()]; below
// floor() nothing is known. An exact series (a polynomial in z) has floor()
// equal to kExact and every absent exponent is genuinely zero.
class LaurentSeries {
public:
  static constexpr int kExact = INT_MIN / 4;

  LaurentSeries() = default;  // exact zero
  // Throws EmptyWindow if floor > top.
  LaurentSeries(int floor, int top);

  static LaurentSeries monomial(int e, const MultiPoly& c = MultiPoly(1));

  int floor() const { return floor_; }
  int top() const { return top_; }
  bool is_exact() const { return floor_ == kExact; }
  const std::map<int, MultiPoly>& coeffs() const { return c_; }

  // Throws TruncationError below the floor.
  MultiPoly coeff(int e) const;
  void set(int e, MultiPoly c);
  void add_to(int e, const MultiPoly& c);

  // Highest exponent with a nonzero coefficient, or floor() if none.
  int degree() const;

  // Drops coefficients below e; raising the floor loses information only.
  LaurentSeries truncated(int new_floor) const;

  LaurentSeries& operator+=(const LaurentSeries& o);
  LaurentSeries& operator-=(const LaurentSeries& o);
  friend LaurentSeries operator+(LaurentSeries a, const LaurentSeries& b) { return a += b; }
  friend LaurentSeries operator-(LaurentSeries a, const LaurentSeries& b) { return a -= b; }
  friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b);
  friend LaurentSeries operator*(const MultiPoly& c, const LaurentSeries& s);
  LaurentSeries shifted(int by) const;  // z^by * this

  LaurentSeries map(const std::function<MultiPoly(const MultiPoly&)>& f) const;
  // Every known coefficient is zero.
  bool is_zero() const;

  std::string to_string() const;

private:
  int floor_ = kExact;
  int top_ = kExact;
  std::map<int, MultiPoly> c_;
};

// The exponent below which a product of these two series is unknown.
int product_floor(const LaurentSeries& a, const LaurentSeries& b);

}  // namespace birkhoff
