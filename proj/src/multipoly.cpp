#include "birkhoff/multipoly.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "birkhoff/errors.hpp"

namespace birkhoff {

namespace {

struct VarTable {
  std::mutex mu;
  std::unordered_map<std::string, VarId> ids;
  std::deque<std::string> names;  // deque keeps references stable
};

VarTable& table() {
  static VarTable t;
  return t;
}

}  // namespace

VarId var_id(std::string_view name) {
  auto& t = table();
  std::lock_guard lock(t.mu);
  auto it = t.ids.find(std::string(name));
  if (it != t.ids.end()) return it->second;
  auto id = static_cast<VarId>(t.names.size());
  t.names.emplace_back(name);
  t.ids.emplace(t.names.back(), id);
  return id;
}

std::optional<VarId> find_var(std::string_view name) {
  auto& t = table();
  std::lock_guard lock(t.mu);
  auto it = t.ids.find(std::string(name));
  if (it == t.ids.end()) return std::nullopt;
  return it->second;
}

const std::string& var_name(VarId id) {
  auto& t = table();
  std::lock_guard lock(t.mu);
  if (id >= t.names.size()) throw UnknownVariable("no variable with id " + std::to_string(id));
  return t.names[id];
}

std::string name_H(int j, int k) { return "H[" + std::to_string(j) + "][" + std::to_string(k) + "]"; }
std::string name_D(int j, int k) { return "D[" + std::to_string(j) + "][" + std::to_string(k) + "]"; }
std::string name_p(int j) { return "p[" + std::to_string(j) + "]"; }
std::string name_x(int j) { return "x[" + std::to_string(j) + "]"; }
std::string name_u(int k) { return "u[" + std::to_string(k) + "]"; }

std::string name_jet(const std::string& base, int j) {
  if (base.size() > 1 && base[0] == 'd' && base.find("/dx[") != std::string::npos)
    return base + "dx[" + std::to_string(j) + "]";
  return "d" + base + "/dx[" + std::to_string(j) + "]";
}

namespace {

bool parse_two(std::string_view name, char head, int& j, int& k) {
  if (name.size() < 2 || name[0] != head || name[1] != '[') return false;
  std::string s(name.substr(1));
  char tail = 0;
  int consumed = 0;
  if (std::sscanf(s.c_str(), "[%d][%d]%n%c", &j, &k, &consumed, &tail) < 2) return false;
  return consumed == static_cast<int>(s.size());
}

}  // namespace

bool parse_H(std::string_view name, int& j, int& k) { return parse_two(name, 'H', j, k); }
bool parse_D(std::string_view name, int& j, int& k) { return parse_two(name, 'D', j, k); }

bool parse_p(std::string_view name, int& j) {
  if (name.size() < 3 || name[0] != 'p' || name[1] != '[') return false;
  std::string s(name.substr(1));
  int consumed = 0;
  if (std::sscanf(s.c_str(), "[%d]%n", &j, &consumed) < 1) return false;
  return consumed == static_cast<int>(s.size());
}

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::vector<Factor> f) : f_(std::move(f)) {
  std::sort(f_.begin(), f_.end());
  std::vector<Factor> merged;
  for (const auto& x : f_) {
    if (x.second == 0) continue;
    if (!merged.empty() && merged.back().first == x.first) merged.back().second += x.second;
    else merged.push_back(x);
  }
  f_ = std::move(merged);
}

Monomial Monomial::of(VarId v, std::uint32_t e) {
  Monomial m;
  if (e) m.f_.emplace_back(v, e);
  return m;
}

std::uint32_t Monomial::degree() const {
  std::uint32_t d = 0;
  for (const auto& x : f_) d += x.second;
  return d;
}

std::uint32_t Monomial::exponent(VarId v) const {
  for (const auto& x : f_)
    if (x.first == v) return x.second;
  return 0;
}

Monomial Monomial::without(VarId v) const {
  Monomial m;
  for (const auto& x : f_)
    if (x.first != v) m.f_.push_back(x);
  return m;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial r;
  r.f_.reserve(a.f_.size() + b.f_.size());
  std::size_t i = 0, j = 0;
  while (i < a.f_.size() && j < b.f_.size()) {
    if (a.f_[i].first == b.f_[j].first) {
      r.f_.emplace_back(a.f_[i].first, a.f_[i].second + b.f_[j].second);
      ++i, ++j;
    } else if (a.f_[i].first < b.f_[j].first) {
      r.f_.push_back(a.f_[i++]);
    } else {
      r.f_.push_back(b.f_[j++]);
    }
  }
  for (; i < a.f_.size(); ++i) r.f_.push_back(a.f_[i]);
  for (; j < b.f_.size(); ++j) r.f_.push_back(b.f_[j]);
  return r;
}

std::size_t Monomial::hash() const {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (const auto& [v, e] : f_) {
    h ^= (static_cast<std::size_t>(v) << 8) ^ e;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool grlex_less(const Monomial& a, const Monomial& b) {
  auto da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  std::size_t i = 0;
  for (; i < fa.size() && i < fb.size(); ++i) {
    if (fa[i].first != fb[i].first) return fa[i].first > fb[i].first;
    if (fa[i].second != fb[i].second) return fa[i].second < fb[i].second;
  }
  // Equal degree and equal common prefix means equal monomials.
  return false;
}

// --------------------------------------------------------------- MultiPoly

MultiPoly::MultiPoly(const Rational& c) {
  if (!c.is_zero()) terms_.push_back({Monomial(), c});
}

MultiPoly MultiPoly::var(VarId v) {
  MultiPoly p;
  p.terms_.push_back({Monomial::of(v), Rational(1)});
  return p;
}

MultiPoly MultiPoly::monomial(const Monomial& m, const Rational& c) {
  MultiPoly p;
  if (!c.is_zero()) p.terms_.push_back({m, c});
  return p;
}

MultiPoly MultiPoly::from_terms(std::vector<Term> terms) {
  MultiPoly p;
  p.terms_ = std::move(terms);
  p.normalize();
  return p;
}

void MultiPoly::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return grlex_less(b.mono, a.mono); });
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!out.empty() && out.back().mono == t.mono) out.back().coeff += t.coeff;
    else out.push_back(std::move(t));
  }
  std::erase_if(out, [](const Term& t) { return t.coeff.is_zero(); });
  terms_ = std::move(out);
}

Rational MultiPoly::constant_term() const {
  if (!terms_.empty() && terms_.back().mono.is_one()) return terms_.back().coeff;
  return Rational(0);
}

std::uint32_t MultiPoly::total_degree() const { return terms_.empty() ? 0 : terms_.front().mono.degree(); }

std::uint32_t MultiPoly::degree_in(VarId v) const {
  std::uint32_t d = 0;
  for (const auto& t : terms_) d = std::max(d, t.mono.exponent(v));
  return d;
}

std::set<VarId> MultiPoly::variables() const {
  std::set<VarId> s;
  for (const auto& t : terms_)
    for (const auto& f : t.mono.factors()) s.insert(f.first);
  return s;
}

bool MultiPoly::mentions(VarId v) const {
  for (const auto& t : terms_)
    if (t.mono.exponent(v)) return true;
  return false;
}

namespace {

// Merges two descending term lists, b scaled by `sign`.
std::vector<Term> merge(const std::vector<Term>& a, const std::vector<Term>& b, bool negate_b) {
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && grlex_less(b[j].mono, a[i].mono))) {
      out.push_back(a[i++]);
    } else if (i == a.size() || grlex_less(a[i].mono, b[j].mono)) {
      out.push_back({b[j].mono, negate_b ? -b[j].coeff : b[j].coeff});
      ++j;
    } else {
      Rational c = negate_b ? a[i].coeff - b[j].coeff : a[i].coeff + b[j].coeff;
      if (!c.is_zero()) out.push_back({a[i].mono, std::move(c)});
      ++i, ++j;
    }
  }
  return out;
}

}  // namespace

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  if (o.terms_.empty()) return *this;
  terms_ = merge(terms_, o.terms_, false);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  if (o.terms_.empty()) return *this;
  terms_ = merge(terms_, o.terms_, true);
  return *this;
}

MultiPoly& MultiPoly::operator*=(const Rational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.coeff *= c;
  return *this;
}

MultiPoly& MultiPoly::operator*=(const MultiPoly& o) {
  *this = *this * o;
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  MultiPoly r;
  r.add_product(a, b);
  return r;
}

void MultiPoly::add_product(const MultiPoly& a, const MultiPoly& b, const Rational& scale) {
  if (a.is_zero() || b.is_zero() || scale.is_zero()) return;
  if (a.size() == 1 || b.size() == 1) {
    // One factor is a single term: the product is already sorted.
    const MultiPoly& one = a.size() == 1 ? a : b;
    const MultiPoly& many = a.size() == 1 ? b : a;
    MultiPoly prod;
    prod.terms_.reserve(many.size());
    Rational c = one.terms_[0].coeff * scale;
    for (const auto& t : many.terms_) prod.terms_.push_back({t.mono * one.terms_[0].mono, t.coeff * c});
    *this += prod;
    return;
  }
  std::unordered_map<Monomial, Rational, MonomialHash> acc;
  acc.reserve(terms_.size() + a.size() * b.size());
  for (auto& t : terms_) acc.emplace(std::move(t.mono), std::move(t.coeff));
  terms_.clear();
  for (const auto& ta : a.terms_) {
    Rational ca = ta.coeff * scale;
    for (const auto& tb : b.terms_) {
      auto [it, fresh] = acc.try_emplace(ta.mono * tb.mono);
      if (fresh) it->second = ca * tb.coeff;
      else it->second += ca * tb.coeff;
    }
  }
  terms_.reserve(acc.size());
  for (auto& [m, c] : acc)
    if (!c.is_zero()) terms_.push_back({m, std::move(c)});
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& x, const Term& y) { return grlex_less(y.mono, x.mono); });
}

MultiPoly operator/(MultiPoly a, const MultiPoly& b) {
  if (!b.is_constant() || b.is_zero()) throw Error("MultiPoly: division by a non-constant polynomial");
  return a *= Rational(1) / b.constant_term();
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly r = *this;
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

MultiPoly MultiPoly::pow(unsigned e) const {
  MultiPoly result(1), base = *this;
  while (e) {
    if (e & 1u) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

bool operator==(const MultiPoly& a, const MultiPoly& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i)
    if (!(a.terms_[i].mono == b.terms_[i].mono) || a.terms_[i].coeff != b.terms_[i].coeff) return false;
  return true;
}

MultiPoly MultiPoly::derivative(VarId v) const {
  std::vector<Term> out;
  for (const auto& t : terms_) {
    std::uint32_t e = t.mono.exponent(v);
    if (!e) continue;
    std::vector<Monomial::Factor> f;
    for (const auto& x : t.mono.factors())
      if (x.first != v) f.push_back(x);
      else if (e > 1) f.emplace_back(v, e - 1);
    out.push_back({Monomial(std::move(f)), t.coeff * Rational(long(e))});
  }
  return from_terms(std::move(out));
}

MultiPoly MultiPoly::coefficient(VarId v, std::uint32_t e) const {
  std::vector<Term> out;
  for (const auto& t : terms_)
    if (t.mono.exponent(v) == e) out.push_back({t.mono.without(v), t.coeff});
  return from_terms(std::move(out));
}

MultiPoly MultiPoly::substitute(const std::function<const MultiPoly*(VarId)>& lookup) const {
  std::map<std::pair<VarId, std::uint32_t>, MultiPoly> powers;
  auto power = [&](VarId v, std::uint32_t e, const MultiPoly& base) -> const MultiPoly& {
    auto it = powers.find({v, e});
    if (it != powers.end()) return it->second;
    return powers.emplace(std::make_pair(v, e), base.pow(e)).first->second;
  };
  std::vector<Term> untouched;
  MultiPoly acc;
  for (const auto& t : terms_) {
    std::vector<Monomial::Factor> keep;
    MultiPoly factor(t.coeff);
    bool replaced = false;
    for (const auto& [v, e] : t.mono.factors()) {
      const MultiPoly* r = lookup(v);
      if (!r) {
        keep.emplace_back(v, e);
        continue;
      }
      replaced = true;
      factor = factor * power(v, e, *r);
      if (factor.is_zero()) break;
    }
    if (!replaced) {
      untouched.push_back(t);
      continue;
    }
    if (factor.is_zero()) continue;
    if (!keep.empty()) factor = factor * MultiPoly::monomial(Monomial(std::move(keep)), Rational(1));
    acc += factor;
  }
  acc += from_terms(std::move(untouched));
  return acc;
}

MultiPoly MultiPoly::substitute(const std::map<VarId, MultiPoly>& values) const {
  return substitute([&](VarId v) -> const MultiPoly* {
    auto it = values.find(v);
    return it == values.end() ? nullptr : &it->second;
  });
}

std::string MultiPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) os << " + ";
    first = false;
    os << t.coeff.to_string();
    if (t.mono.is_one()) continue;
    os << " * ";
    bool firstf = true;
    for (const auto& [v, e] : t.mono.factors()) {
      if (!firstf) os << "*";
      firstf = false;
      os << var_name(v);
      if (e != 1) os << "^" << e;
    }
  }
  return os.str();
}

// ------------------------------------------------------------------ parser

namespace {

class Parser {
public:
  explicit Parser(std::string_view s) : s_(s) {}

  MultiPoly parse_all() {
    MultiPoly p = expr();
    skip();
    if (i_ != s_.size()) fail("unexpected character");
    return p;
  }

private:
  [[noreturn]] void fail(const std::string& why) {
    throw ParseError(why + " at offset " + std::to_string(i_) + " in '" + std::string(s_) + "'");
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  MultiPoly expr() {
    MultiPoly acc;
    bool neg = false;
    if (eat('-')) neg = true;
    else eat('+');
    MultiPoly t = term();
    acc = neg ? -t : t;
    for (;;) {
      if (eat('+')) acc += term();
      else if (eat('-')) acc -= term();
      else return acc;
    }
  }

  MultiPoly term() {
    MultiPoly acc = power();
    for (;;) {
      if (eat('*')) {
        acc = acc * power();
      } else if (peek_division()) {
        ++i_;
        MultiPoly d = power();
        if (!d.is_constant() || d.is_zero()) fail("division only by nonzero constants");
        acc *= Rational(1) / d.constant_term();
      } else {
        return acc;
      }
    }
  }

  bool peek_division() {
    skip();
    return i_ < s_.size() && s_[i_] == '/';
  }

  MultiPoly power() {
    MultiPoly base = atom();
    if (eat('^')) {
      skip();
      std::size_t start = i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      if (start == i_) fail("expected exponent");
      base = base.pow(static_cast<unsigned>(std::stoul(std::string(s_.substr(start, i_ - start)))));
    }
    return base;
  }

  MultiPoly atom() {
    skip();
    if (i_ >= s_.size()) fail("unexpected end");
    char c = s_[i_];
    if (c == '(') {
      ++i_;
      MultiPoly p = expr();
      if (!eat(')')) fail("expected ')'");
      return p;
    }
    if (c == '-') {
      ++i_;
      return -atom();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      return MultiPoly(Rational::parse(std::string(s_.substr(start, i_ - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return MultiPoly::var(symbol());
    fail("unexpected character");
  }

  // identifier, bracket groups, and for jets "/dx[..]" continuations.
  std::string symbol() {
    std::size_t start = i_;
    auto ident = [&] {
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
    };
    auto brackets = [&] {
      while (i_ < s_.size() && s_[i_] == '[') {
        while (i_ < s_.size() && s_[i_] != ']') ++i_;
        if (i_ == s_.size()) fail("unterminated '['");
        ++i_;
      }
    };
    ident();
    brackets();
    while (i_ + 1 < s_.size() && s_[i_] == '/' && std::isalpha(static_cast<unsigned char>(s_[i_ + 1]))) {
      ++i_;
      while (i_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[i_]))) {
        ident();
        brackets();
      }
    }
    return std::string(s_.substr(start, i_ - start));
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

}  // namespace

MultiPoly MultiPoly::parse(std::string_view text) { return Parser(text).parse_all(); }

// ------------------------------------------------------------ CompiledPoly

CompiledPoly::CompiledPoly(const MultiPoly& p, const std::vector<VarId>& order) {
  for (const auto& t : p.terms()) {
    CTerm ct{t.coeff.to_double(), {}};
    for (const auto& [v, e] : t.mono.factors()) {
      auto it = std::find(order.begin(), order.end(), v);
      if (it == order.end()) throw UnknownVariable("compiled polynomial mentions " + var_name(v));
      ct.f.emplace_back(static_cast<int>(it - order.begin()), static_cast<int>(e));
    }
    terms_.push_back(std::move(ct));
  }
}

double CompiledPoly::operator()(const double* values) const {
  double acc = 0;
  for (const auto& t : terms_) {
    double m = t.c;
    for (const auto& [slot, e] : t.f)
      for (int i = 0; i < e; ++i) m *= values[slot];
    acc += m;
  }
  return acc;
}

Eigen::ArrayXd CompiledPoly::operator()(const std::vector<const Eigen::ArrayXd*>& values, Eigen::Index n) const {
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(n);
  for (const auto& t : terms_) {
    Eigen::ArrayXd m = Eigen::ArrayXd::Constant(n, t.c);
    for (const auto& [slot, e] : t.f)
      for (int i = 0; i < e; ++i) m *= *values[slot];
    acc += m;
  }
  return acc;
}

}  // namespace birkhoff
