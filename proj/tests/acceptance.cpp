// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "birkhoff/cohomology.hpp"
#include "birkhoff/flows.hpp"
#include "birkhoff/geometry.hpp"
#include "birkhoff/numerics.hpp"
#include "birkhoff/strata.hpp"
#include "golden_flows.hpp"
#include "golden_relations.hpp"

using namespace birkhoff;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "failed: ";
      else detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

MultiPoly P(const std::string& s) { return MultiPoly::parse(s); }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const RelationSet& relations(int g) {
  static std::map<int, RelationSet> cache;
  auto it = cache.find(g);
  if (it == cache.end()) it = cache.emplace(g, derive_relations(StratumSpec::with_window(g, 13))).first;
  return it->second;
}

Grid1D ring(std::size_t n) { return Grid1D::uniform(0, 2 * std::numbers::pi, n); }

// ------------------------------------------------------------------ 1

void relation_golden(Outcome& o) {
  const auto t0 = Clock::now();
  std::size_t n = 0;
  for (const auto& r : golden::printed_relations()) {
    ++n;
    MultiPoly res = reduce(P(r.lhs) - P(r.rhs), relations(r.genus));
    o.require(res.is_zero(), "g=" + std::to_string(r.genus) + " " + r.lhs + " = " + r.rhs + " leaves " + res.to_string());
  }
  const double dt = seconds_since(t0);
  o.require(dt < 60, "runtime " + std::to_string(dt) + " s");
  o.detail << (o.pass ? "" : " | ") << n << " printed relations, " << dt << " s";
}

// ------------------------------------------------------------------ 2

void associativity(Outcome& o) {
  for (int g = 0; g <= 2; ++g) {
    const StratumSpec s = associativity_spec(g, 13);
    const RelationSet rs = derive_relations(s);
    std::vector<int> idx;
    for (int i : s.basis_indices())
      if (i <= 13) idx.push_back(i);
    Report r = verify_associativity(structure_constants(s, rs, 13), rs, idx);
    o.require(r.ok(), "g=" + std::to_string(g) + ": " + std::to_string(r.failures.size()) + " residuals");
    o.detail << (g ? ", " : "") << "g=" << g << " " << r.checked << " residuals";
  }
}

// ------------------------------------------------------------------ 3

void generator_counts(Outcome& o) {
  for (int g = 0; g <= 2; ++g) {
    const std::size_t n = relations(g).generators().size();
    o.require(n == static_cast<std::size_t>(2 * g + 1), "g=" + std::to_string(g) + " has " + std::to_string(n));
    o.detail << (g ? ", " : "") << n;
  }
}

// ------------------------------------------------------------------ 4

void cohomology(Outcome& o) {
  struct Case {
    int g, window;
    std::vector<int> triple_indices, squares;
  };
  const std::vector<Case> cases{{0, 15, {1, 2, 3, 5}, {1, 3, 5}}, {1, 21, {2, 3, 4, 5, 7}, {3, 5}}, {2, 21, {0, 2, 5, 7}, {5, 7}}};
  for (const auto& c : cases) {
    const CocycleContext ctx = make_cocycle_context(StratumSpec::with_window(c.g, c.window));
    std::vector<std::array<int, 3>> triples;
    for (int a : c.triple_indices)
      for (int b : c.triple_indices)
        for (int d : c.triple_indices) triples.push_back({a, b, d});
    std::vector<std::pair<int, int>> pairs;
    for (int a : ctx.spec.basis_indices())
      for (int b : ctx.spec.basis_indices())
        if (a + b <= 13) pairs.emplace_back(a, b);
    std::size_t checked = 0;
    for (const Report& r : {cocycle_identity_check(ctx, triples), coboundary_check(ctx, pairs),
                            square_relation_check(ctx, c.squares), parity_check(ctx)}) {
      o.require(r.ok(), "g=" + std::to_string(c.g) + " " + r.name);
      checked += r.checked;
    }
    o.detail << (c.g ? ", " : "") << "g=" << c.g << " " << checked << " identities";
  }
}

// ------------------------------------------------------------------ 5

void check_printed(Outcome& o, const HydroSystem& s, const golden::PrintedFlow& printed) {
  if (s.fields.size() != printed.lines.size()) {
    o.require(false, printed.label + ": field count");
    return;
  }
  for (const auto& line : printed.lines)
    o.require((s.rhs_of(line.field) - P(line.rhs)).is_zero(), printed.label + " " + line.field);
}

void flows(Outcome& o) {
  const RelationSet& rs1 = relations(1);
  const HydroSystem x5 = derive_dckdv(1, rs1, 1), x7 = derive_dckdv(1, rs1, 2);
  check_printed(o, x5, golden::dckdv_g1_x5());
  check_printed(o, x7, golden::dckdv_g1_x7());
  check_printed(o, derive_dckdv(2, relations(2), 1), golden::dckdv_g2_x7());
  const auto flux = conservation_fluxes(2, relations(2), 7);
  const auto printed = golden::fluxes_g2_x7();
  o.require(flux.size() == printed.lines.size(), "flux count");
  for (std::size_t i = 0; i < flux.size() && i < printed.lines.size(); ++i)
    o.require(flux[i] == P(printed.lines[i].rhs), "conservation law " + std::to_string(i));
  check_printed(o, moduli_flow_g1(rs1, 5), golden::moduli_x5());
  check_printed(o, moduli_flow_g1(rs1, 7), golden::moduli_x7());
  o.require(discriminant_flow_g1(rs1, 5) == P(golden::discriminant_x5()), "discriminant flow");
  Report comm = commutativity_check(x5, x7);
  o.require(comm.ok(), "x5/x7 commutator");
  o.detail << "u-form, fluxes, moduli, discriminant; commutator residual 0 on " << comm.checked << " fields";
}

// ------------------------------------------------------------------ 6

void discriminant(Outcome& o) {
  const std::vector<MultiPoly> u{P("u[0]"), P("u[1]"), P("u[2]")};
  const auto m = moduli_and_discriminant(CurveCoeffs<MultiPoly>{1, u});
  o.require((m.discriminant - m.standard_form).is_zero(), "resultant vs -16(4g2^3 + 27g3^2)");
  const auto m0 = moduli_and_discriminant(CurveCoeffs<MultiPoly>{1, {MultiPoly(), u[1], u[2]}});
  o.require((m0.discriminant - m0.reduced_form).is_zero(), "u0 = 0 form");
  const MultiPoly gap = m.discriminant - m.printed_form;
  o.require(!gap.is_zero(), "the 2 vs 4 variant should differ");
  o.detail << "exact; printed 2g2^3 variant is off by " << gap.to_string();
}

// ------------------------------------------------------------------ 7

void curvature(Outcome& o) {
  const auto w = metric_and_curvature_W1c(Rational(0), Rational(0), Rational(0));
  o.require(w.R1212 == Rational(-1, 2), "R1212 = " + w.R1212.to_string());
  o.require(w.R1213 == Rational(0), "R1213 = " + w.R1213.to_string());
  o.require(w.R1223 == Rational(-2), "R1223 = " + w.R1223.to_string());
  o.require(w.R1313 == Rational(-4), "R1313 = " + w.R1313.to_string());
  o.require(w.D == Rational(4), "D = " + w.D.to_string());
  o.detail << "(" << w.R1212.to_string() << ", " << w.R1213.to_string() << ", " << w.R1223.to_string() << ", "
           << w.R1313.to_string() << "), D = " << w.D.to_string();
}

// ------------------------------------------------------------------ 8

void bh_numerics(Outcome& o) {
  const auto t0 = Clock::now();
  const Grid1D line = Grid1D::uniform(-1, 1, 201, Boundary::extrapolate);
  const Profile lin = Profile::parse("poly(0, -1)");
  double worst = 0;
  for (double t : {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3}) {
    auto sol = solve_bh_characteristics(lin, line, t);
    for (std::size_t i = 0; i < line.n; ++i)
      worst = std::max(worst, std::abs(sol.u.values[i] + line.x(i) / (1 - 3 * t)));
  }
  o.require(worst < 1e-10, "closed-form error " + std::to_string(worst));
  std::vector<double> times;
  for (int i = 0; i <= 30; ++i) times.push_back(0.3 * i / 30.0);
  const auto fit = catastrophe_estimate(bh_gradient_trace(Profile::parse("sin(x)"), ring(4096), times));
  const double rel = std::abs(fit.t_c - 1.0 / 3) * 3;
  o.require(rel < 0.01, "t_c = " + std::to_string(fit.t_c));
  const double dt = seconds_since(t0);
  o.require(dt < 10, "runtime " + std::to_string(dt) + " s");
  o.detail << (o.pass ? "" : " | ") << "max error " << worst << ", t_c = " << fit.t_c << " (" << rel * 100 << "%), " << dt
           << " s";
}

// ------------------------------------------------------------------ 9

void dckdv_cross(Outcome& o) {
  const std::size_t n = 2048;
  const Grid1D g = ring(n);
  std::vector<Field1D> roots{Profile::parse("2 + 0.05*sin(x)").sample(g, "gamma[1]"),
                             Profile::parse("0.05*sin(1, 1.5707963267948966)").sample(g, "gamma[2]"),
                             Profile::parse("-2 + 0.05*sin(1, 1)").sample(g, "gamma[3]")};
  const HydroSystem us = derive_dckdv(1, relations(1), 1);
  auto curve_of = [&](const std::vector<Field1D>& gam) {
    std::vector<Field1D> u(3, Field1D{g, std::vector<double>(n), ""});
    for (std::size_t j = 0; j < n; ++j) {
      const auto c = curve_from_roots({gam[0].values[j], gam[1].values[j], gam[2].values[j]});
      for (std::size_t s = 0; s < 3; ++s) {
        const VarId f = us.fields[s];
        u[s].label = var_name(f);
        u[s].values[j] = f == var_id(name_u(0)) ? c[0] : f == var_id(name_u(1)) ? c[1] : c[2];
      }
    }
    return u;
  };
  const double t = 0.5;
  const auto mol = solve_mol(us, curve_of(roots), t);
  const auto back = curve_of(solve_diagonal(riemann_system_g1(), roots, t).fields);
  double disc = 0;
  for (std::size_t s = 0; s < 3; ++s) disc = std::max(disc, max_abs_diff(mol.fields[s].values, back[s].values));
  o.require(disc < 1e-3, "discrepancy " + std::to_string(disc));

  // Equal roots move as one scalar field with d gamma/dx5 = (5/2) gamma gamma_x.
  const Profile f = Profile::parse("1 + 0.3*sin(x)");
  CharacteristicOptions scalar;
  scalar.coeff = -2.5;
  std::vector<double> errs, dxs;
  for (std::size_t m : {256u, 512u, 1024u}) {
    const Grid1D h = ring(m);
    const Field1D g0 = f.sample(h, "gamma");
    const auto r = solve_diagonal(riemann_system_g1(), {g0, g0, g0}, 0.8);
    errs.push_back(max_abs_diff(r.fields[0].values, solve_bh_characteristics(f, h, 0.8, scalar).u.values));
    dxs.push_back(h.dx);
  }
  const double order = std::log2(errs[1] / errs[2]);
  o.require(order > 0.8, "equal-root order " + std::to_string(order));
  o.require(errs[2] < 10 * dxs[2], "equal-root error " + std::to_string(errs[2]) + " vs dx " + std::to_string(dxs[2]));
  o.detail << (o.pass ? "" : " | ") << "L-inf " << disc << "; equal roots error " << errs[2] << " (order " << order << ")";
}

// ----------------------------------------------------------------- 10

void hirota(Outcome& o) {
  auto quad = [](double x, double y) { return 0.5 * x * x + 2 * x * y + 1.5 * y * y; };
  // Dyadic nodes keep every sample and stencil sum exact in binary, so the
  // residual is exactly zero rather than zero up to rounding.
  const double q = hirota_residual(sample_2d(quad, -1, 0.125, 17, -1, 0.125, 17), 0.125, 0.125).abs().maxCoeff();
  o.require(q == 0.0, "quadratic residual " + std::to_string(q));
  std::vector<double> errs;
  for (std::size_t n : {81u, 161u, 321u}) {
    const double h = 1.0 / static_cast<double>(n - 1);
    errs.push_back(hirota_residual(sample_2d(selfsimilar_phi, 0.5, h, n, 1.0, h, n), h, h).abs().maxCoeff());
  }
  const double o1 = std::log2(errs[0] / errs[1]), o2 = std::log2(errs[1] / errs[2]);
  o.require(o1 >= 3.5 && o2 >= 3.5, "orders " + std::to_string(o1) + ", " + std::to_string(o2));
  double worst = 0;
  for (auto [x3, x5] : {std::pair{1.0, 2.0}, {-0.4, 0.7}, {3.0, -1.5}}) {
    const DnlsCurve c = dnls_curve(selfsimilar_jets(x3, x5));
    worst = std::max({worst, std::abs(c.u2 - 2 * x3 / (3 * x5)), std::abs(c.u1)});
  }
  o.require(worst < 1e-12, "degenerate curve off by " + std::to_string(worst));
  o.detail << (o.pass ? "" : " | ") << "quadratic " << q << ", orders " << o1 << ", " << o2 << ", u2 = 2x3/(3x5)";
}

// ----------------------------------------------------------------- 11

void blowup(Outcome& o) {
  const auto s = bh_cocycle_trace(Profile::parse("0.5 + sin(x)"), ring(4096), 200);
  o.require(s.correlation >= 0.99, "correlation " + std::to_string(s.correlation));
  o.require(s.monotone_final_tenth, "sup|psi0| not monotone over the final tenth");
  o.require(s.decade_samples >= 10, "only " + std::to_string(s.decade_samples) + " samples in the final decade");
  o.detail << (o.pass ? "" : " | ") << "correlation " << s.correlation << " over " << s.decade_samples << " samples";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"relation golden suite", relation_golden},
      {"associativity, indices <= 13", associativity},
      {"generator counts 1, 3, 5", generator_counts},
      {"cocycle, coboundary, psi(p,p) = 2p f(p)", cohomology},
      {"flow reproduction", flows},
      {"discriminant identities", discriminant},
      {"W1c curvature at y = 0", curvature},
      {"BH numerics", bh_numerics},
      {"dcKdV g=1 cross-validation", dckdv_cross},
      {"Hirota residuals", hirota},
      {"cocycle blow-up correlation", blowup},
  };
  int failed = 0, k = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " threw " << e.what();
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << ++k << "] " << name << ": " << o.detail.str() << " ("
              << seconds_since(t0) << " s)" << std::endl;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << criteria.size() - failed << "/" << criteria.size() << std::endl;
  return failed ? 1 : 0;
}
