#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>

#include <Eigen/Core>

namespace birkhoff {

// Exact rational number, always in lowest terms with positive denominator.
class Rational {
public:
  Rational() = default;
  Rational(long n) : q_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(int n) : q_(static_cast<long>(n)) {}  // NOLINT
  Rational(long n, long d);
  explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }

  // Accepts "n", "-n", "n/d".
  static Rational parse(const std::string& s);

  const mpq_class& raw() const { return q_; }
  bool is_zero() const { return sgn(q_) == 0; }
  bool is_one() const { return q_ == 1; }
  bool is_integer() const { return q_.get_den() == 1; }
  int sign() const { return sgn(q_); }
  double to_double() const { return q_.get_d(); }
  std::string to_string() const;

  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  Rational operator-() const { return Rational(mpq_class(-q_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  Rational pow(unsigned e) const;
  std::size_t hash() const;

private:
  mpq_class q_;
};

inline std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

Rational abs(const Rational& r);
inline Rational binomial_half(unsigned k);  // binom(1/2, k)

inline Rational binomial_half(unsigned k) {
  Rational r(1);
  for (unsigned i = 0; i < k; ++i) r = r * (Rational(1, 2) - Rational(long(i))) / Rational(long(i) + 1);
  return r;
}

}  // namespace birkhoff

template <>
struct std::hash<birkhoff::Rational> {
  std::size_t operator()(const birkhoff::Rational& r) const noexcept { return r.hash(); }
};

// Lets Eigen dense types hold exact rationals (used by the metric code).
namespace Eigen {
template <>
struct NumTraits<birkhoff::Rational> : GenericNumTraits<birkhoff::Rational> {
  using Real = birkhoff::Rational;
  using NonInteger = birkhoff::Rational;
  using Nested = birkhoff::Rational;
  using Literal = birkhoff::Rational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 16,
    MulCost = 32
  };
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
};
}  // namespace Eigen
