#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "birkhoff/rational.hpp"

namespace birkhoff {

// Variables are interned process-wide; ids are handed out in first-seen order.
using VarId = std::uint32_t;

VarId var_id(std::string_view name);
std::optional<VarId> find_var(std::string_view name);
const std::string& var_name(VarId id);

// Symbol naming used throughout the library.
std::string name_H(int j, int k);
std::string name_D(int j, int k);
std::string name_p(int j);
std::string name_x(int j);
std::string name_u(int k);
// Jet of a symbol along x[j]; a jet of a jet appends a further dx[i].
std::string name_jet(const std::string& base, int j);

// Parses names produced above. Returns false if the shape does not match.
bool parse_H(std::string_view name, int& j, int& k);
bool parse_D(std::string_view name, int& j, int& k);
bool parse_p(std::string_view name, int& j);

// Factors sorted by variable id, exponents positive.
class Monomial {
public:
  using Factor = std::pair<VarId, std::uint32_t>;

  Monomial() = default;
  explicit Monomial(std::vector<Factor> f);
  static Monomial of(VarId v, std::uint32_t e = 1);

  const std::vector<Factor>& factors() const { return f_; }
  bool is_one() const { return f_.empty(); }
  std::uint32_t degree() const;
  std::uint32_t exponent(VarId v) const;
  Monomial without(VarId v) const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.f_ == b.f_; }
  std::size_t hash() const;

private:
  std::vector<Factor> f_;
};

// Graded-lex order; the smaller variable id ranks higher.
bool grlex_less(const Monomial& a, const Monomial& b);

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept { return m.hash(); }
};

struct Term {
  Monomial mono;
  Rational coeff;
};

// Sparse polynomial with exact rational coefficients. Terms are kept
// strictly descending in grlex order with no zero coefficients, so equality
// of polynomials is equality of term lists.
class MultiPoly {
public:
  MultiPoly() = default;
  MultiPoly(const Rational& c);  // NOLINT(google-explicit-constructor)
  MultiPoly(long c) : MultiPoly(Rational(c)) {}  // NOLINT
  MultiPoly(int c) : MultiPoly(Rational(c)) {}  // NOLINT

  static MultiPoly var(VarId v);
  static MultiPoly var(std::string_view name) { return var(var_id(name)); }
  static MultiPoly monomial(const Monomial& m, const Rational& c);
  static MultiPoly from_terms(std::vector<Term> terms);  // any order, duplicates ok

  // Parses +, -, *, ^n, parentheses, rational literals and symbols.
  static MultiPoly parse(std::string_view text);

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one()); }
  Rational constant_term() const;
  std::uint32_t total_degree() const;
  std::uint32_t degree_in(VarId v) const;
  std::set<VarId> variables() const;
  bool mentions(VarId v) const;

  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(const MultiPoly& o);
  MultiPoly& operator*=(const Rational& c);
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(MultiPoly a, const Rational& c) { return a *= c; }
  friend MultiPoly operator*(const Rational& c, MultiPoly a) { return a *= c; }
  // Division by a nonzero constant polynomial only.
  friend MultiPoly operator/(MultiPoly a, const MultiPoly& b);
  MultiPoly operator-() const;
  MultiPoly pow(unsigned e) const;

  // add_product(a, b) is *this += a * b without a temporary.
  void add_product(const MultiPoly& a, const MultiPoly& b, const Rational& scale = Rational(1));

  friend bool operator==(const MultiPoly& a, const MultiPoly& b);
  friend bool operator!=(const MultiPoly& a, const MultiPoly& b) { return !(a == b); }

  MultiPoly derivative(VarId v) const;
  // Coefficient of v^e, as a polynomial in the remaining variables.
  MultiPoly coefficient(VarId v, std::uint32_t e) const;

  // Replaces each variable for which `lookup` returns non-null.
  MultiPoly substitute(const std::function<const MultiPoly*(VarId)>& lookup) const;
  MultiPoly substitute(const std::map<VarId, MultiPoly>& values) const;

  template <typename T, typename F>
  T evaluate(F&& value_of) const {
    T acc = T(0);
    for (const auto& t : terms_) {
      T m = T(coeff_cast<T>(t.coeff));
      for (const auto& [v, e] : t.mono.factors()) {
        T x = value_of(v);
        T p = x;
        for (std::uint32_t i = 1; i < e; ++i) p = p * x;
        m = m * p;
      }
      acc = acc + m;
    }
    return acc;
  }

  std::string to_string() const;

private:
  template <typename T>
  static T coeff_cast(const Rational& r) {
    if constexpr (std::is_same_v<T, Rational>) return r;
    else if constexpr (std::is_same_v<T, MultiPoly>) return MultiPoly(r);
    else return T(r.to_double());
  }
  void normalize();  // sort, merge, drop zeros

  std::vector<Term> terms_;
};

inline std::ostream& operator<<(std::ostream& os, const MultiPoly& p) { return os << p.to_string(); }

// Double-precision polynomial over a fixed ordered variable list, for
// evaluating on whole arrays of grid values.
class CompiledPoly {
public:
  CompiledPoly() = default;
  CompiledPoly(const MultiPoly& p, const std::vector<VarId>& order);

  double operator()(const double* values) const;
  Eigen::ArrayXd operator()(const std::vector<const Eigen::ArrayXd*>& values, Eigen::Index n) const;

private:
  struct CTerm {
    double c;
    std::vector<std::pair<int, int>> f;  // (slot, exponent)
  };
  std::vector<CTerm> terms_;
};

}  // namespace birkhoff
