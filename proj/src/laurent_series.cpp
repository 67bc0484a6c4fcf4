#include "birkhoff/laurent_series.hpp"

#include <algorithm>
#include <sstream>

#include "birkhoff/errors.hpp"

namespace birkhoff {

LaurentSeries::LaurentSeries(int floor, int top) : floor_(floor), top_(top) {
  if (floor != kExact && floor > top)
    throw EmptyWindow("window [" + std::to_string(floor) + ", " + std::to_string(top) + "] is empty");
}

LaurentSeries LaurentSeries::monomial(int e, const MultiPoly& c) {
  LaurentSeries s(kExact, e);
  s.set(e, c);
  return s;
}

MultiPoly LaurentSeries::coeff(int e) const {
  if (e < floor_)
    throw TruncationError("coefficient z^" + std::to_string(e) + " is below the known floor " +
                          std::to_string(floor_));
  auto it = c_.find(e);
  return it == c_.end() ? MultiPoly() : it->second;
}

void LaurentSeries::set(int e, MultiPoly c) {
  if (e < floor_) throw TruncationError("cannot set z^" + std::to_string(e) + " below the floor");
  top_ = std::max(top_, e);
  if (c.is_zero()) c_.erase(e);
  else c_[e] = std::move(c);
}

void LaurentSeries::add_to(int e, const MultiPoly& c) {
  if (c.is_zero()) return;
  if (e < floor_) return;  // contributions to unknown coefficients are meaningless
  top_ = std::max(top_, e);
  auto& slot = c_[e];
  slot += c;
  if (slot.is_zero()) c_.erase(e);
}

int LaurentSeries::degree() const { return c_.empty() ? floor_ : c_.rbegin()->first; }

LaurentSeries LaurentSeries::truncated(int new_floor) const {
  LaurentSeries r(std::max(new_floor, floor_), std::max(top_, new_floor));
  for (auto it = c_.lower_bound(r.floor_); it != c_.end(); ++it) r.c_.insert(*it);
  return r;
}

LaurentSeries& LaurentSeries::operator+=(const LaurentSeries& o) {
  int f = std::max(floor_, o.floor_);
  top_ = std::max(top_, o.top_);
  if (f > floor_) *this = truncated(f);
  floor_ = f;
  for (const auto& [e, c] : o.c_) add_to(e, c);
  return *this;
}

LaurentSeries& LaurentSeries::operator-=(const LaurentSeries& o) {
  int f = std::max(floor_, o.floor_);
  top_ = std::max(top_, o.top_);
  if (f > floor_) *this = truncated(f);
  floor_ = f;
  for (const auto& [e, c] : o.c_) add_to(e, -c);
  return *this;
}

int product_floor(const LaurentSeries& a, const LaurentSeries& b) {
  int f = LaurentSeries::kExact;
  // The unknown tail of one factor pollutes everything below its floor
  // shifted by the other factor's highest exponent.
  if (!a.is_exact()) f = std::max(f, a.floor() + b.top());
  if (!b.is_exact()) f = std::max(f, b.floor() + a.top());
  return f;
}

LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
  LaurentSeries r(product_floor(a, b), a.top() + b.top());
  const int f = r.floor_;
  std::map<int, MultiPoly> acc;
  for (const auto& [ea, ca] : a.c_) {
    for (auto it = b.c_.rbegin(); it != b.c_.rend(); ++it) {
      int e = ea + it->first;
      if (e < f) break;  // b is traversed downward, so the rest is out of window
      acc[e].add_product(ca, it->second);
    }
  }
  for (auto& [e, c] : acc)
    if (!c.is_zero()) r.c_.emplace(e, std::move(c));
  return r;
}

LaurentSeries operator*(const MultiPoly& c, const LaurentSeries& s) {
  LaurentSeries r(s.floor_, s.top_);
  if (c.is_zero()) return r;
  for (const auto& [e, x] : s.c_) r.c_.emplace(e, c * x);
  return r;
}

LaurentSeries LaurentSeries::shifted(int by) const {
  LaurentSeries r(is_exact() ? kExact : floor_ + by, top_ + by);
  for (const auto& [e, c] : c_) r.c_.emplace(e + by, c);
  return r;
}

LaurentSeries LaurentSeries::map(const std::function<MultiPoly(const MultiPoly&)>& f) const {
  LaurentSeries r(floor_, top_);
  for (const auto& [e, c] : c_) {
    MultiPoly m = f(c);
    if (!m.is_zero()) r.c_.emplace(e, std::move(m));
  }
  return r;
}

bool LaurentSeries::is_zero() const { return c_.empty(); }

std::string LaurentSeries::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
    if (!first) os << " + ";
    first = false;
    os << "(" << it->second.to_string() << ")*z^" << it->first;
  }
  if (first) os << "0";
  if (!is_exact()) os << " + O(z^" << (floor_ - 1) << ")";
  return os.str();
}

}  // namespace birkhoff
