#include "birkhoff/rational.hpp"

#include "birkhoff/errors.hpp"

namespace birkhoff {

Rational::Rational(long n, long d) {
  if (d == 0) throw Error("Rational: zero denominator");
  q_ = mpq_class(n, d);
  q_.canonicalize();
}

Rational Rational::parse(const std::string& s) {
  if (s.empty()) throw ParseError("empty rational literal");
  mpq_class q;
  if (q.set_str(s, 10) != 0) throw ParseError("bad rational literal '" + s + "'");
  if (q.get_den() == 0) throw ParseError("zero denominator in '" + s + "'");
  q.canonicalize();
  return Rational(q);
}

std::string Rational::to_string() const { return q_.get_str(10); }

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw Error("Rational: division by zero");
  q_ /= o.q_;
  return *this;
}

Rational Rational::pow(unsigned e) const {
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), q_.get_num_mpz_t(), e);
  mpz_pow_ui(d.get_mpz_t(), q_.get_den_mpz_t(), e);
  return Rational(mpq_class(n, d));
}

std::size_t Rational::hash() const {
  // Two limbs of numerator and denominator are plenty for bucketing.
  auto limb = [](const mpz_class& z) -> std::size_t {
    return mpz_size(z.get_mpz_t()) ? static_cast<std::size_t>(mpz_getlimbn(z.get_mpz_t(), 0)) : 0;
  };
  std::size_t h = limb(q_.get_num()) * 0x9e3779b97f4a7c15ULL;
  h ^= limb(q_.get_den()) + 0x7f4a7c159e3779b9ULL + (h << 6) + (h >> 2);
  return h ^ static_cast<std::size_t>(sgn(q_) + 1);
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

}  // namespace birkhoff
