#include "birkhoff/numerics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

#include "birkhoff/strata.hpp"

namespace birkhoff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_grid(const std::vector<Field1D>& fs, const char* who) {
  if (fs.empty()) throw ShapeMismatch(std::string(who) + ": no fields");
  for (const auto& f : fs) {
    if (f.values.size() != fs[0].grid.n || f.grid.n != fs[0].grid.n)
      throw ShapeMismatch(std::string(who) + ": field '" + f.label + "' does not match the grid");
  }
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Neighbour index with the grid's boundary rule.
std::size_t neighbour(std::ptrdiff_t i, const Grid1D& g) {
  const auto n = static_cast<std::ptrdiff_t>(g.n);
  if (g.boundary == Boundary::periodic) return static_cast<std::size_t>(((i % n) + n) % n);
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, n - 1));
}

double one_sided_max_grad(const std::vector<double>& f, const Grid1D& g) {
  double m = 0;
  const std::size_t last = g.boundary == Boundary::periodic ? g.n : g.n - 1;
  for (std::size_t i = 0; i < last; ++i) m = std::max(m, std::abs(f[neighbour(static_cast<std::ptrdiff_t>(i) + 1, g)] - f[i]));
  return m / g.dx;
}

}  // namespace

// ------------------------------------------------------------------ grid

Grid1D Grid1D::uniform(double a, double b, std::size_t n, Boundary bc) {
  Grid1D g;
  g.x0 = a;
  g.n = n;
  g.boundary = bc;
  if (n < 2) throw GridError("need at least 8 points, got " + std::to_string(n));
  g.dx = bc == Boundary::periodic ? (b - a) / static_cast<double>(n) : (b - a) / static_cast<double>(n - 1);
  g.validate();
  return g;
}

void Grid1D::validate() const {
  if (n < 8) throw GridError("need at least 8 points, got " + std::to_string(n));
  if (!(dx > 0) || !std::isfinite(dx) || !std::isfinite(x0)) throw GridError("spacing must be positive and finite");
}

// --------------------------------------------------------------- profiles

namespace {

struct ProfileLexer {
  const std::string& s;
  std::size_t i = 0;

  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    skip();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  bool at_number() {
    skip();
    return i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.');
  }
  double number() {
    skip();
    const char* begin = s.c_str() + i;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    i += static_cast<std::size_t>(end - begin);
    return v;
  }
  double signed_number() {
    skip();
    double sign = 1;
    while (i < s.size() && (s[i] == '-' || s[i] == '+')) {
      if (s[i] == '-') sign = -sign;
      ++i;
      skip();
    }
    return sign * number();
  }
  std::string word() {
    skip();
    std::size_t b = i;
    while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(b, i - b);
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("profile '" + s + "': " + what + " at offset " + std::to_string(i));
  }
};

}  // namespace

Profile Profile::parse(const std::string& text) {
  Profile p;
  p.text_ = text;
  ProfileLexer lx{text};
  lx.skip();
  if (lx.i >= text.size()) lx.fail("empty expression");
  bool first = true;
  while (true) {
    lx.skip();
    if (lx.i >= text.size()) break;
    double sign = 1;
    if (lx.eat('+')) {
    } else if (lx.eat('-')) {
      sign = -1;
    } else if (!first) {
      lx.fail("expected '+' or '-'");
    }
    first = false;

    double scale = sign;
    bool have_number = false;
    if (lx.at_number()) {
      scale *= lx.number();
      have_number = true;
      if (!lx.eat('*')) {
        p.terms_.push_back({Term::Kind::constant, scale, {1.0}});
        continue;
      }
    }
    std::string name = lx.word();
    if (name.empty()) lx.fail(have_number ? "expected a primitive after '*'" : "expected a number or primitive");
    if (name == "x") {
      p.terms_.push_back({Term::Kind::poly, scale, {0.0, 1.0}});
      continue;
    }
    Term t{Term::Kind::constant, scale, {}};
    if (name == "const") t.kind = Term::Kind::constant;
    else if (name == "sin") t.kind = Term::Kind::sine;
    else if (name == "gauss") t.kind = Term::Kind::gauss;
    else if (name == "poly") t.kind = Term::Kind::poly;
    else lx.fail("unknown primitive '" + name + "'");
    if (!lx.eat('(')) lx.fail("expected '('");
    if (!lx.eat(')')) {
      do {
        lx.skip();
        if (lx.i < text.size() && text[lx.i] == 'x' && t.args.empty()) {
          ++lx.i;  // sin(x) is sin(1, 0)
          continue;
        }
        t.args.push_back(lx.signed_number());
      } while (lx.eat(','));
      if (!lx.eat(')')) lx.fail("expected ')'");
    }
    switch (t.kind) {
      case Term::Kind::constant:
        if (t.args.size() != 1) lx.fail("const takes one argument");
        break;
      case Term::Kind::sine:
        if (t.args.size() > 2) lx.fail("sin takes at most (k, phase)");
        if (t.args.empty()) t.args.push_back(1.0);
        if (t.args.size() == 1) t.args.push_back(0.0);
        break;
      case Term::Kind::gauss:
        if (t.args.size() != 2) lx.fail("gauss takes (center, width)");
        if (!(t.args[1] > 0)) lx.fail("gauss width must be positive");
        break;
      case Term::Kind::poly:
        if (t.args.empty()) lx.fail("poly needs coefficients");
        break;
    }
    p.terms_.push_back(std::move(t));
  }
  return p;
}

Profile Profile::constant(double c) {
  Profile p;
  p.terms_.push_back({Term::Kind::constant, c, {1.0}});
  p.text_ = std::to_string(c);
  return p;
}

namespace {

// order 0, 1, 2 of one primitive at x.
double term_eval(int kind, const std::vector<double>& a, double x, int order) {
  switch (kind) {
    case 0:  // constant
      return order == 0 ? a[0] : 0.0;
    case 1: {  // sine
      const double k = a[0], arg = k * x + a[1];
      if (order == 0) return std::sin(arg);
      if (order == 1) return k * std::cos(arg);
      return -k * k * std::sin(arg);
    }
    case 2: {  // gauss
      const double c = a[0], w2 = a[1] * a[1], d = x - c, e = std::exp(-d * d / w2);
      if (order == 0) return e;
      if (order == 1) return -2 * d / w2 * e;
      return (4 * d * d / (w2 * w2) - 2 / w2) * e;
    }
    default: {  // poly, Horner on the requested derivative
      double acc = 0;
      for (std::size_t i = a.size(); i-- > static_cast<std::size_t>(order);) {
        double c = a[i];
        for (int o = 0; o < order; ++o) c *= static_cast<double>(i - static_cast<std::size_t>(o));
        acc = acc * x + c;
      }
      return acc;
    }
  }
}

}  // namespace

double Profile::value(double x) const {
  double s = 0;
  for (const auto& t : terms_) s += t.scale * term_eval(static_cast<int>(t.kind), t.args, x, 0);
  return s;
}

double Profile::d1(double x) const {
  double s = 0;
  for (const auto& t : terms_) s += t.scale * term_eval(static_cast<int>(t.kind), t.args, x, 1);
  return s;
}

double Profile::d2(double x) const {
  double s = 0;
  for (const auto& t : terms_) s += t.scale * term_eval(static_cast<int>(t.kind), t.args, x, 2);
  return s;
}

Field1D Profile::sample(const Grid1D& g, std::string label) const {
  g.validate();
  Field1D f{g, std::vector<double>(g.n), std::move(label)};
  for (std::size_t i = 0; i < g.n; ++i) f.values[i] = value(g.x(i));
  return f;
}

// ------------------------------------------------------------ derivatives

std::vector<double> derivative4(const std::vector<double>& f, const Grid1D& g) {
  if (f.size() != g.n) throw ShapeMismatch("derivative4: array length differs from the grid");
  if (f.size() < 5) throw ShapeMismatch("derivative4 needs at least 5 points");
  const std::size_t n = f.size();
  const double s = 1.0 / (12.0 * g.dx);
  std::vector<double> d(n);
  if (g.boundary == Boundary::periodic) {
    for (std::size_t i = 0; i < n; ++i) {
      auto at = [&](std::ptrdiff_t o) { return f[neighbour(static_cast<std::ptrdiff_t>(i) + o, g)]; };
      d[i] = (at(-2) - 8 * at(-1) + 8 * at(1) - at(2)) * s;
    }
    return d;
  }
  for (std::size_t i = 2; i + 2 < n; ++i) d[i] = (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) * s;
  d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) * s;
  d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) * s;
  d[n - 1] = (25 * f[n - 1] - 48 * f[n - 2] + 36 * f[n - 3] - 16 * f[n - 4] + 3 * f[n - 5]) * s;
  d[n - 2] = (3 * f[n - 1] + 10 * f[n - 2] - 18 * f[n - 3] + 6 * f[n - 4] - f[n - 5]) * s;
  return d;
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ShapeMismatch("max_abs_diff: lengths differ");
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_one_sided_gradient(const std::vector<Field1D>& fields) {
  double m = 0;
  for (const auto& f : fields) {
    if (f.values.size() != f.grid.n) throw ShapeMismatch("field '" + f.label + "' does not match its grid");
    m = std::max(m, one_sided_max_grad(f.values, f.grid));
  }
  return m;
}

// ------------------------------------------------------ BH characteristics

double breaking_time(const Profile& f0, const Grid1D& g, double coeff) {
  g.validate();
  if (coeff == 0) return kInf;
  // Steepest compression: maximize s(x) = -sign(c) f0'(x) over the domain.
  const double sgn = coeff > 0 ? -1.0 : 1.0;
  auto s = [&](double x) { return sgn * f0.d1(x); };
  const double a = g.x0;
  const double b = g.boundary == Boundary::periodic ? g.x0 + g.length() : g.x(g.n - 1);
  const std::size_t m = 16 * g.n;
  const double h = (b - a) / static_cast<double>(m);
  double best = -kInf, xb = a;
  for (std::size_t i = 0; i <= m; ++i) {
    const double x = a + h * static_cast<double>(i);
    const double v = s(x);
    if (v > best) best = v, xb = x;
  }
  // Golden-section polish on the bracketing cells.
  double lo = std::max(a, xb - h), hi = std::min(b, xb + h);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80 && hi - lo > 1e-15 * (1 + std::abs(xb)); ++it) {
    const double c1 = hi - phi * (hi - lo), c2 = lo + phi * (hi - lo);
    if (s(c1) > s(c2)) hi = c2;
    else lo = c1;
  }
  best = std::max(best, s(0.5 * (lo + hi)));
  if (!(best > 0)) return kInf;
  return 1.0 / (std::abs(coeff) * best);
}

namespace {

double characteristic_foot(const Profile& f0, double x, double ct, const CharacteristicOptions& opt) {
  auto G = [&](double xi) { return xi + ct * f0.value(xi) - x; };
  double xi = x - ct * f0.value(x);
  // Bracket the root of the increasing map xi -> xi + c t f0(xi) - x.
  double span = std::max(1.0, std::abs(ct) * (1.0 + std::abs(f0.value(x))));
  double lo = xi - span, hi = xi + span;
  int grow = 0;
  while (G(lo) > 0 && grow++ < 60) lo -= (span *= 2);
  grow = 0;
  while (G(hi) < 0 && grow++ < 60) hi += (span *= 2);
  if (G(lo) > 0 || G(hi) < 0) throw RootFindDiverged("no bracket for the characteristic through x = " + std::to_string(x));
  xi = std::clamp(xi, lo, hi);
  for (int it = 0; it < opt.max_iter; ++it) {
    const double r = G(xi);
    if (r == 0) return xi;
    if (r < 0) lo = xi;
    else hi = xi;
    const double dr = 1.0 + ct * f0.d1(xi);
    double next = dr > 0 ? xi - r / dr : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - xi);
    xi = next;
    if (step <= opt.tol * std::max(1.0, std::abs(xi)) || hi - lo <= opt.tol * std::max(1.0, std::abs(xi))) return xi;
  }
  throw RootFindDiverged("characteristic root did not converge at x = " + std::to_string(x));
}

}  // namespace

CharacteristicSolution solve_bh_characteristics(const Profile& f0, const Grid1D& g, double t,
                                                const CharacteristicOptions& opt) {
  g.validate();
  if (!(t >= 0)) throw ConfigError("characteristic solver needs t >= 0");
  const double tc = breaking_time(f0, g, opt.coeff);
  if (t >= tc) throw PastCatastrophe("t = " + std::to_string(t) + " is not before t_c = " + std::to_string(tc));
  CharacteristicSolution sol;
  sol.u = {g, std::vector<double>(g.n), "u"};
  sol.u_x = {g, std::vector<double>(g.n), "u_x"};
  sol.xi.resize(g.n);
  const double ct = opt.coeff * t;
  for (std::size_t i = 0; i < g.n; ++i) {
    const double xi = characteristic_foot(f0, g.x(i), ct, opt);
    const double fp = f0.d1(xi);
    const double jac = 1.0 + ct * fp;
    if (jac <= 0) throw PastCatastrophe("characteristics cross at x = " + std::to_string(g.x(i)));
    sol.xi[i] = xi;
    sol.u.values[i] = f0.value(xi);
    sol.u_x.values[i] = fp / jac;
  }
  sol.report.method = CatastropheReport::Method::characteristic_exact;
  sol.report.t_estimate = tc;
  sol.report.max_gradient_trace.push_back({t, max_abs(sol.u_x.values)});
  return sol;
}

std::vector<TracePoint> bh_gradient_trace(const Profile& f0, const Grid1D& g, const std::vector<double>& times,
                                          const CharacteristicOptions& opt) {
  std::vector<TracePoint> out;
  out.reserve(times.size());
  for (double t : times) {
    auto sol = solve_bh_characteristics(f0, g, t, opt);
    out.push_back({t, max_abs(derivative4(sol.u.values, g))});
  }
  return out;
}

// ----------------------------------------------------------- diagonal solver

DiagonalResult solve_diagonal(const DiagonalSystem& sys, const std::vector<Field1D>& init, double t_end,
                              const DiagonalOptions& opt, const StepRecorder& record) {
  if (!(opt.cfl > 0 && opt.cfl <= 1)) throw CFLViolation("cfl must lie in (0, 1], got " + std::to_string(opt.cfl));
  if (init.size() != sys.invariants.size())
    throw ShapeMismatch("diagonal system has " + std::to_string(sys.invariants.size()) + " invariants, got " +
                        std::to_string(init.size()) + " fields");
  require_same_grid(init, "solve_diagonal");
  const Grid1D& g = init[0].grid;
  g.validate();
  const std::size_t n = g.n, m = init.size();

  std::vector<CompiledPoly> speed;
  for (const auto& s : sys.speeds) speed.emplace_back(s, sys.invariants);

  DiagonalResult res;
  res.fields = init;
  for (const auto& f : res.fields)
    if (!all_finite(f.values)) throw CatastropheSignal("non-finite initial data", 0, {}, init);

  std::vector<std::vector<double>> sp(m, std::vector<double>(n));
  std::vector<double> point(m);
  auto speeds_of = [&](const std::vector<std::vector<double>>& y) {
    double mx = 0;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < m; ++i) point[i] = y[i][j];
      for (std::size_t i = 0; i < m; ++i) {
        sp[i][j] = speed[i](point.data());
        mx = std::max(mx, std::abs(sp[i][j]));
      }
    }
    return mx;
  };
  // d y_i / dt = speed_i * d y_i / dx, upwinded by the sign of the speed.
  auto rhs = [&](const std::vector<std::vector<double>>& y, std::vector<std::vector<double>>& out) {
    speeds_of(y);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double s = sp[i][j];
        const auto jj = static_cast<std::ptrdiff_t>(j);
        const double d = s > 0 ? y[i][neighbour(jj + 1, g)] - y[i][j] : y[i][j] - y[i][neighbour(jj - 1, g)];
        out[i][j] = s * d / g.dx;
      }
    }
  };
  auto max_grad = [&](const std::vector<std::vector<double>>& y) {
    double mg = 0;
    for (const auto& f : y) mg = std::max(mg, one_sided_max_grad(f, g));
    return mg;
  };
  auto as_fields = [&](const std::vector<std::vector<double>>& y) {
    std::vector<Field1D> fs = init;
    for (std::size_t i = 0; i < m; ++i) fs[i].values = y[i];
    return fs;
  };

  std::vector<std::vector<double>> y(m), k(m, std::vector<double>(n)), s1(m, std::vector<double>(n)),
      s2(m, std::vector<double>(n));
  for (std::size_t i = 0; i < m; ++i) y[i] = init[i].values;

  std::vector<double> snaps = opt.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  while (next_snap < snaps.size() && snaps[next_snap] <= 0) {
    res.snapshots.emplace_back(0.0, as_fields(y));
    ++next_snap;
  }

  const double g0 = max_grad(y);
  const double limit = opt.threshold_factor * g0;
  res.trace.push_back({0.0, g0});
  if (record) record(0.0, as_fields(y));
  const std::size_t every = std::max<std::size_t>(1, opt.trace_every);

  double t = 0;
  while (t < t_end) {
    const double mx = speeds_of(y);
    double dt = mx > 0 ? opt.cfl * g.dx / mx : t_end - t;
    double stop = t_end;
    if (next_snap < snaps.size()) stop = std::min(stop, snaps[next_snap]);
    bool hit = false;
    if (t + dt >= stop) dt = stop - t, hit = true;

    rhs(y, k);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) s1[i][j] = y[i][j] + dt * k[i][j];
    rhs(s1, k);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) s2[i][j] = 0.75 * y[i][j] + 0.25 * (s1[i][j] + dt * k[i][j]);
    rhs(s2, k);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) y[i][j] = y[i][j] / 3.0 + 2.0 / 3.0 * (s2[i][j] + dt * k[i][j]);
    t = hit ? stop : t + dt;
    ++res.steps;

    for (std::size_t i = 0; i < m; ++i) {
      if (!all_finite(y[i])) {
        CatastropheReport rep{t, res.trace, CatastropheReport::Method::extrapolated};
        throw CatastropheSignal("non-finite values in '" + init[i].label + "'", t, rep, as_fields(y));
      }
    }
    const double mg = max_grad(y);
    const bool over = g0 > 0 ? mg > limit : false;
    if (res.steps % every == 0 || over || t >= t_end) res.trace.push_back({t, mg});
    if (record) record(t, as_fields(y));
    if (over) {
      CatastropheReport rep{t, res.trace, CatastropheReport::Method::extrapolated};
      try {
        rep.t_estimate = catastrophe_estimate(res.trace).t_c;
      } catch (const NoBlowupDetected&) {
      }
      throw CatastropheSignal("max gradient " + std::to_string(mg) + " passed the threshold", t, rep, as_fields(y));
    }
    while (next_snap < snaps.size() && snaps[next_snap] <= t) {
      res.snapshots.emplace_back(snaps[next_snap], as_fields(y));
      ++next_snap;
    }
  }
  res.t = t;
  res.fields = as_fields(y);
  return res;
}

// --------------------------------------------------------- method of lines

namespace {

struct CompiledHydro {
  std::vector<VarId> slots;  // fields, then first jets
  std::vector<CompiledPoly> rhs;
  std::vector<std::vector<CompiledPoly>> jac;  // d rhs_i / d jet_k
  std::size_t m = 0;

  explicit CompiledHydro(const HydroSystem& sys) : m(sys.fields.size()) {
    slots = sys.fields;
    std::vector<VarId> jets;
    for (std::size_t i = 0; i < m; ++i) {
      const auto vs = sys.jet(i).variables();
      jets.push_back(*vs.begin());
    }
    slots.insert(slots.end(), jets.begin(), jets.end());
    for (std::size_t i = 0; i < m; ++i) {
      try {
        rhs.emplace_back(sys.rhs[i], slots);
      } catch (const UnknownVariable& e) {
        throw InvalidFlow(sys.name + ": rhs is not first order in the fields (" + e.what() + ")");
      }
      jac.emplace_back();
      for (std::size_t k = 0; k < m; ++k) jac.back().emplace_back(sys.rhs[i].derivative(jets[k]), slots);
    }
  }
};

}  // namespace

std::vector<std::vector<double>> evaluate_rhs(const HydroSystem& sys, const std::vector<Field1D>& fields) {
  if (fields.size() != sys.fields.size()) throw ShapeMismatch(sys.name + ": wrong number of fields");
  require_same_grid(fields, "evaluate_rhs");
  CompiledHydro c(sys);
  const Grid1D& g = fields[0].grid;
  const std::size_t m = c.m, n = g.n;
  std::vector<std::vector<double>> jets(m);
  for (std::size_t i = 0; i < m; ++i) jets[i] = derivative4(fields[i].values, g);
  std::vector<std::vector<double>> out(m, std::vector<double>(n));
  std::vector<double> pt(2 * m);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) pt[i] = fields[i].values[j], pt[m + i] = jets[i][j];
    for (std::size_t i = 0; i < m; ++i) out[i][j] = c.rhs[i](pt.data());
  }
  return out;
}

MolResult solve_mol(const HydroSystem& sys, const std::vector<Field1D>& init, double t_end, const MolOptions& opt,
                    const StepRecorder& record) {
  if (!(opt.cfl > 0 && opt.cfl <= 1)) throw CFLViolation("cfl must lie in (0, 1], got " + std::to_string(opt.cfl));
  if (init.size() != sys.fields.size()) throw ShapeMismatch(sys.name + ": wrong number of fields");
  require_same_grid(init, "solve_mol");
  if (!is_hydrodynamic(sys)) throw InvalidFlow(sys.name + " is not of hydrodynamic type");
  const Grid1D& g = init[0].grid;
  g.validate();
  CompiledHydro c(sys);
  const std::size_t m = c.m, n = g.n;

  using State = std::vector<std::vector<double>>;
  std::vector<double> pt(2 * m);
  auto rhs = [&](const State& y, State& out) {
    State jets(m);
    for (std::size_t i = 0; i < m; ++i) jets[i] = derivative4(y[i], g);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < m; ++i) pt[i] = y[i][j], pt[m + i] = jets[i][j];
      for (std::size_t i = 0; i < m; ++i) out[i][j] = c.rhs[i](pt.data());
    }
  };
  auto speed_bound = [&](const State& y) {
    double b = 0;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < m; ++i) pt[i] = y[i][j], pt[m + i] = 0;
      for (std::size_t i = 0; i < m; ++i) {
        double row = 0;
        for (std::size_t k = 0; k < m; ++k) row += std::abs(c.jac[i][k](pt.data()));
        b = std::max(b, row);
      }
    }
    return b;
  };
  auto as_fields = [&](const State& y) {
    std::vector<Field1D> fs = init;
    for (std::size_t i = 0; i < m; ++i) fs[i].values = y[i];
    return fs;
  };
  auto max_grad = [&](const State& y) {
    double mg = 0;
    for (const auto& f : y) mg = std::max(mg, max_abs(derivative4(f, g)));
    return mg;
  };

  State y(m), k1(m, std::vector<double>(n)), k2 = k1, k3 = k1, k4 = k1, tmp = k1;
  for (std::size_t i = 0; i < m; ++i) y[i] = init[i].values;
  MolResult res;
  std::vector<double> snaps = opt.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  while (next_snap < snaps.size() && snaps[next_snap] <= 0) res.snapshots.emplace_back(0.0, as_fields(y)), ++next_snap;
  res.trace.push_back({0.0, max_grad(y)});
  if (record) record(0.0, as_fields(y));

  double t = 0;
  while (t < t_end) {
    const double b = speed_bound(y);
    double dt = b > 0 ? opt.cfl * g.dx / b : t_end - t;
    double stop = t_end;
    if (next_snap < snaps.size()) stop = std::min(stop, snaps[next_snap]);
    bool hit = false;
    if (t + dt >= stop) dt = stop - t, hit = true;

    auto axpy = [&](const State& k, double a) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) tmp[i][j] = y[i][j] + a * k[i][j];
    };
    rhs(y, k1);
    axpy(k1, 0.5 * dt);
    rhs(tmp, k2);
    axpy(k2, 0.5 * dt);
    rhs(tmp, k3);
    axpy(k3, dt);
    rhs(tmp, k4);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) y[i][j] += dt / 6.0 * (k1[i][j] + 2 * k2[i][j] + 2 * k3[i][j] + k4[i][j]);
    t = hit ? stop : t + dt;
    ++res.steps;
    for (std::size_t i = 0; i < m; ++i) {
      if (!all_finite(y[i])) {
        CatastropheReport rep{t, res.trace, CatastropheReport::Method::extrapolated};
        throw CatastropheSignal("non-finite values in '" + init[i].label + "'", t, rep, as_fields(y));
      }
    }
    res.trace.push_back({t, max_grad(y)});
    if (record) record(t, as_fields(y));
    while (next_snap < snaps.size() && snaps[next_snap] <= t) res.snapshots.emplace_back(snaps[next_snap], as_fields(y)), ++next_snap;
  }
  res.t = t;
  res.fields = as_fields(y);
  return res;
}

// ---------------------------------------------------------------- Benney

DiagonalSystem benney_riemann_system() {
  DiagonalSystem d{"Benney Riemann invariants", "t", {var_id("r+"), var_id("r-")}, {}};
  MultiPoly rp = MultiPoly::var("r+"), rm = MultiPoly::var("r-");
  // u = (r+ + r-)/2, sqrt(v) = (r+ - r-)/4.
  d.speeds.push_back(-(Rational(3, 4) * rp + Rational(1, 4) * rm));
  d.speeds.push_back(-(Rational(1, 4) * rp + Rational(3, 4) * rm));
  return d;
}

ReducedCurve benney_curve(double u, double v) {
  ReducedCurve c{};
  c.u2 = -u;
  c.u1 = 0.25 * u * u - v;
  c.g2 = c.u1 - c.u2 * c.u2 / 3.0;
  c.g3 = 2.0 * c.u2 * c.u2 * c.u2 / 27.0 - c.u1 * c.u2 / 3.0;
  c.delta = 16.0 * c.u1 * c.u1 * (c.u2 * c.u2 - 4.0 * c.u1);
  return c;
}

namespace {

void uv_from_riemann(const std::vector<Field1D>& r, Field1D& u, Field1D& v, double t) {
  const std::size_t n = r[0].values.size();
  u = {r[0].grid, std::vector<double>(n), "u"};
  v = {r[0].grid, std::vector<double>(n), "v"};
  for (std::size_t j = 0; j < n; ++j) {
    const double rp = r[0].values[j], rm = r[1].values[j];
    const double sq = 0.25 * (rp - rm);
    if (!(sq > 0)) throw VacuumState("v reached 0 at x = " + std::to_string(r[0].grid.x(j)) + ", t = " + std::to_string(t));
    u.values[j] = 0.5 * (rp + rm);
    v.values[j] = sq * sq;
  }
}

}  // namespace

BenneyResult solve_benney(const Field1D& u0, const Field1D& v0, double t_end, const DiagonalOptions& opt,
                          std::size_t probe, const StepRecorder& record) {
  require_same_grid({u0, v0}, "solve_benney");
  const Grid1D& g = u0.grid;
  g.validate();
  if (probe == static_cast<std::size_t>(-1)) probe = g.n / 2;
  if (probe >= g.n) throw ShapeMismatch("probe index outside the grid");
  std::vector<Field1D> r{{g, std::vector<double>(g.n), "r+"}, {g, std::vector<double>(g.n), "r-"}};
  for (std::size_t j = 0; j < g.n; ++j) {
    if (!(v0.values[j] > 0))
      throw VacuumState("initial v is not positive at x = " + std::to_string(g.x(j)));
    const double s = 2.0 * std::sqrt(v0.values[j]);
    r[0].values[j] = u0.values[j] + s;
    r[1].values[j] = u0.values[j] - s;
  }

  BenneyResult out;
  auto rec = [&](double t, const std::vector<Field1D>& fs) {
    Field1D u, v;
    uv_from_riemann(fs, u, v, t);
    BenneyTracePoint p;
    p.t = t;
    p.max_grad = std::max(one_sided_max_grad(u.values, g), one_sided_max_grad(v.values, g));
    const ReducedCurve c = benney_curve(u.values[probe], v.values[probe]);
    p.delta = c.delta;
    p.g2 = c.g2;
    p.g3 = c.g3;
    p.min_abs_delta = kInf;
    for (std::size_t j = 0; j < g.n; ++j)
      p.min_abs_delta = std::min(p.min_abs_delta, std::abs(benney_curve(u.values[j], v.values[j]).delta));
    out.trace.push_back(p);
    if (record) record(t, {u, v});
  };
  out.riemann = solve_diagonal(benney_riemann_system(), r, t_end, opt, rec);
  uv_from_riemann(out.riemann.fields, out.u, out.v, out.riemann.t);
  out.t = out.riemann.t;
  return out;
}

// ---------------------------------------------------------- catastrophe

CatastropheFit catastrophe_estimate(const std::vector<TracePoint>& trace) {
  const std::size_t n = trace.size();
  if (n < 5) throw NoBlowupDetected("need at least 5 trace samples, got " + std::to_string(n));
  const std::size_t start = n - std::max<std::size_t>(3, n / 3);
  if (!(trace.back().max_grad > trace[start].max_grad))
    throw NoBlowupDetected("max gradient is not growing over the final third");
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double k = static_cast<double>(n - start);
  std::vector<double> ys;
  for (std::size_t i = start; i < n; ++i) {
    if (!(trace[i].max_grad > 0)) throw NoBlowupDetected("zero gradient in the fit window");
    const double t = trace[i].t, y = 1.0 / trace[i].max_grad;
    ys.push_back(y);
    st += t, sy += y, stt += t * t, sty += t * y;
  }
  const double den = k * stt - st * st;
  if (den <= 0) throw NoBlowupDetected("trace times are degenerate");
  CatastropheFit f;
  f.slope = (k * sty - st * sy) / den;
  f.intercept = (sy - f.slope * st) / k;
  f.used = n - start;
  if (!(f.slope < 0)) throw NoBlowupDetected("1/max gradient is not decreasing");
  f.t_c = -f.intercept / f.slope;
  const double mean = sy / k;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = start; i < n; ++i) {
    const double y = ys[i - start], yhat = f.intercept + f.slope * trace[i].t;
    ss_res += (y - yhat) * (y - yhat);
    ss_tot += (y - mean) * (y - mean);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

// --------------------------------------------------------------- Hirota

namespace {

// Integer weights, scaled once at the end: on dyadic data every sum is exact.
constexpr double kD1[5] = {1, -8, 0, 8, -1};     // / 12 h
constexpr double kD2[5] = {-1, 16, -30, 16, -1};  // / 12 h^2

struct Hessian {
  Eigen::ArrayXXd aa, ab, bb;  // second derivatives on the interior
};

Hessian hessian4(const Eigen::ArrayXXd& f, double ha, double hb) {
  if (f.rows() < 5 || f.cols() < 5)
    throw ShapeMismatch("4th-order stencils need at least 5x5 samples, got " + std::to_string(f.rows()) + "x" +
                        std::to_string(f.cols()));
  if (!(ha > 0) || !(hb > 0)) throw GridError("spacings must be positive");
  const Eigen::Index r = f.rows() - 4, c = f.cols() - 4;
  Hessian h{Eigen::ArrayXXd::Zero(r, c), Eigen::ArrayXXd::Zero(r, c), Eigen::ArrayXXd::Zero(r, c)};
  for (int a = 0; a < 5; ++a) {
    h.aa += kD2[a] * f.block(a, 2, r, c);
    h.bb += kD2[a] * f.block(2, a, r, c);
    for (int b = 0; b < 5; ++b)
      if (kD1[a] != 0 && kD1[b] != 0) h.ab += kD1[a] * kD1[b] * f.block(a, b, r, c);
  }
  h.aa /= 12 * ha * ha;
  h.bb /= 12 * hb * hb;
  h.ab /= 144 * ha * hb;
  return h;
}

}  // namespace

Eigen::ArrayXXd hirota_residual(const Eigen::ArrayXXd& phi, double h3, double h5) {
  const Hessian h = hessian4(phi, h3, h5);
  return h.aa * h.bb - h.ab * h.ab + h.aa * h.aa * h.aa;
}

Eigen::ArrayXXd hirota_residual_bh(const Eigen::ArrayXXd& F, double h1, double hk, int k, bool as_printed) {
  const Hessian h = hessian4(F, h1, hk);
  if (k == 3) return h.ab - 1.5 * h.aa * h.aa;
  if (k == 5) return h.ab + (as_printed ? 2.5 : -2.5) * h.aa * h.aa * h.aa;
  throw ConfigError("BH Hirota mode needs k = 3 or k = 5, got " + std::to_string(k));
}

Eigen::ArrayXXd sample_2d(const std::function<double(double, double)>& f, double a3, double h3, std::size_t n3,
                          double a5, double h5, std::size_t n5) {
  Eigen::ArrayXXd out(static_cast<Eigen::Index>(n3), static_cast<Eigen::Index>(n5));
  for (std::size_t i = 0; i < n3; ++i)
    for (std::size_t j = 0; j < n5; ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f(a3 + h3 * static_cast<double>(i), a5 + h5 * static_cast<double>(j));
  return out;
}

std::vector<double> selfsimilar_ode_residual(const std::vector<double>& y, const std::vector<double>& phi,
                                             const std::vector<double>& dphi) {
  if (phi.size() != y.size() || dphi.size() != y.size()) throw ShapeMismatch("ODE samples differ in length");
  std::vector<double> r(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double s = phi[i] + 2 * y[i] * dphi[i];
    r[i] = y[i] * y[i] * phi[i] * dphi[i] + 4 * s * s * s;
  }
  return r;
}

std::vector<double> selfsimilar_ode_residual(const std::vector<double>& y, const std::vector<double>& phi) {
  if (y.size() < 5) throw ShapeMismatch("need at least 5 samples");
  Grid1D g;
  g.x0 = y.front();
  g.dx = (y.back() - y.front()) / static_cast<double>(y.size() - 1);
  g.n = y.size();
  g.boundary = Boundary::extrapolate;
  if (!(g.dx > 0)) throw GridError("y grid must be increasing");
  for (std::size_t i = 1; i < y.size(); ++i)
    if (std::abs(y[i] - y[0] - g.dx * static_cast<double>(i)) > 1e-9 * std::max(1.0, std::abs(y[i])))
      throw GridError("y grid must be uniform");
  return selfsimilar_ode_residual(y, phi, derivative4(phi, g));
}

double selfsimilar_phi(double x3, double x5) { return -std::pow(x3, 4) / (216.0 * x5 * x5); }

PhiJets selfsimilar_jets(double x3, double x5) {
  return {-x3 * x3 / (18.0 * x5 * x5), x3 * x3 * x3 / (27.0 * x5 * x5 * x5), -std::pow(x3, 4) / (36.0 * std::pow(x5, 4))};
}

DnlsCurve dnls_curve(const PhiJets& j) {
  DnlsCurve c{};
  c.H31 = j.phi33;
  c.H3m1 = -j.phi35 / (2.0 * j.phi33);
  c.u2 = -j.phi35 / j.phi33;
  c.u1 = 2.0 * j.phi33 + j.phi35 * j.phi35 / (4.0 * j.phi33 * j.phi33);
  c.g2 = c.u1 - c.u2 * c.u2 / 3.0;
  c.g3 = 2.0 * c.u2 * c.u2 * c.u2 / 27.0 - c.u1 * c.u2 / 3.0;
  return c;
}

// ------------------------------------------------------- cocycle traces

MultiPoly big_cell_H(int a, int b) {
  static const RelationSet rs0 = derive_relations(StratumSpec::with_window(0, 13));
  return reduce(MultiPoly::var(name_H(a, b)), rs0);
}

double final_decade_correlation(const std::vector<double>& x, const std::vector<double>& y, std::size_t* used) {
  if (x.size() != y.size() || x.empty()) throw ShapeMismatch("correlation needs equal, non-empty samples");
  const double top = x.back();
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= top / 10.0 && x[i] > 0 && y[i] > 0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (used) *used = lx.size();
  if (lx.size() < 3) return 0;
  const double k = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / k;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / k;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return 0;
  return sxy / std::sqrt(sxx * syy);
}

bool monotone_over_final_fraction(const std::vector<double>& y, double fraction) {
  if (y.size() < 2) return false;
  const auto k = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(y.size()))));
  for (std::size_t i = y.size() - std::min(k, y.size()) + 1; i < y.size(); ++i)
    if (!(y[i] > y[i - 1])) return false;
  return true;
}

namespace {

void summarize(CocycleTraceSummary& s) {
  std::vector<double> x, y;
  for (const auto& p : s.trace) x.push_back(p.max_grad), y.push_back(p.sup_psi);
  s.correlation = final_decade_correlation(x, y, &s.decade_samples);
  s.monotone_final_tenth = monotone_over_final_fraction(y, 0.1);
}

}  // namespace

CocycleTraceSummary bh_cocycle_trace(const Profile& f0, const Grid1D& g, std::size_t samples, double threshold_factor,
                                     const std::map<int, double>& alpha) {
  const double tc = breaking_time(f0, g, 3);
  if (!std::isfinite(tc)) throw NoBlowupDetected("profile '" + f0.text() + "' does not break");
  if (samples < 5) throw ConfigError("cocycle trace needs at least 5 samples");

  // H^a_b(u) and dH^a_b/du for the entries the cocycle formulas read.
  const VarId h11 = var_id(name_H(1, 1));
  struct Entry {
    int a, b;
    CompiledPoly dh;  // dH^a_b / du
  };
  std::vector<Entry> entries;
  for (int a : {1, 3})
    for (int b : {1, 3, 5, 7}) entries.push_back({a, b, CompiledPoly(big_cell_H(a, b).derivative(h11), {h11})});
  // d u / d x_{2m+1} = c_{m+1} u^m u_x along the hierarchy.
  std::vector<std::pair<int, double>> flows;
  for (const auto& [m, w] : alpha) {
    if (m < 0) throw ConfigError("variation index must be nonnegative");
    flows.emplace_back(m, w * bh_coefficient(m + 1).to_double());
  }

  CocycleTraceSummary out;
  double g0 = -1;
  for (std::size_t s = 0; s < samples; ++s) {
    const double frac = static_cast<double>(s) / static_cast<double>(samples - 1);
    const double t = tc * (1.0 - std::pow(10.0, -6.0 * frac));
    if (t >= tc) break;
    // Lagrangian sampling: the feet xi sit on the grid nodes, so the
    // steepest characteristic is resolved however narrow the front gets.
    Field1D uu = f0.sample(g, "u"), ux{g, std::vector<double>(g.n), "u_x"};
    for (std::size_t i = 0; i < g.n; ++i) {
      const double fp = f0.d1(g.x(i));
      ux.values[i] = fp / (1.0 + 3.0 * t * fp);
    }
    const double mg = max_abs(ux.values);
    if (g0 < 0) g0 = mg;
    if (g0 > 0 && mg > threshold_factor * g0) break;

    PairSamples dF;
    dF.n = g.n;
    for (const auto& e : entries) {
      Samples v(g.n);
      for (std::size_t i = 0; i < g.n; ++i) {
        const double u = uu.values[i], ugrad = ux.values[i];
        double du = 0;
        for (const auto& [m, c] : flows) du += c * std::pow(u, m) * ugrad;
        v[i] = -e.b * e.dh(&u) * du;
      }
      dF.set(e.a, e.b, std::move(v));
    }
    CocycleTracePoint p{t, mg, 0, 0};
    for (auto [j, k] : {std::pair{0, 0}, {0, 1}, {1, 1}}) {
      const auto cs = numeric_cocycle_g0(dF, j, k, 3);
      p.sup_psi = std::max(p.sup_psi, cs.sup_psi());
      p.sup_f = std::max(p.sup_f, cs.sup_f());
    }
    out.trace.push_back(p);
  }
  summarize(out);
  return out;
}

CocycleTraceSummary benney_cocycle_trace(const Field1D& u0, const Field1D& v0, double t_end, const DiagonalOptions& opt) {
  CocycleTraceSummary out;
  auto rec = [&](double t, const std::vector<Field1D>& uv) {
    const Grid1D& g = uv[0].grid;
    const auto du = derivative4(uv[0].values, g), dv = derivative4(uv[1].values, g);
    const auto cs = numeric_cocycle_dnls(uv[0].values, uv[1].values, du, dv);
    out.trace.push_back({t, std::max(max_abs(du), max_abs(dv)), cs.sup_psi(), cs.sup_f()});
  };
  try {
    solve_benney(u0, v0, t_end, opt, static_cast<std::size_t>(-1), rec);
  } catch (const CatastropheSignal&) {
    // The trace up to the threshold is what we report.
  }
  summarize(out);
  return out;
}

}  // namespace birkhoff
