#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "birkhoff/cohomology.hpp"
#include "birkhoff/errors.hpp"
#include "birkhoff/flows.hpp"

namespace birkhoff {

enum class Boundary { periodic, extrapolate };

struct Grid1D {
  double x0 = 0;
  double dx = 1;
  std::size_t n = 8;
  Boundary boundary = Boundary::periodic;

  // n points on [a, b), or on [a, b] with the last point at b when not periodic.
  static Grid1D uniform(double a, double b, std::size_t n, Boundary bc = Boundary::periodic);
  void validate() const;  // GridError
  double x(std::size_t i) const { return x0 + dx * static_cast<double>(i); }
  double length() const { return dx * static_cast<double>(n); }
};

struct Field1D {
  Grid1D grid;
  std::vector<double> values;
  std::string label;
};

struct TracePoint {
  double t = 0;
  double max_grad = 0;
};

struct CatastropheReport {
  enum class Method { characteristic_exact, extrapolated };
  double t_estimate = 0;  // +inf when nothing breaks
  std::vector<TracePoint> max_gradient_trace;
  Method method = Method::extrapolated;
};

// The gradient threshold was crossed, or a value went non-finite.
class CatastropheSignal : public Error {
public:
  CatastropheSignal(const std::string& what, double t, CatastropheReport report, std::vector<Field1D> last)
      : Error("CatastropheSignal: " + what), t_(t), report_(std::move(report)), last_(std::move(last)) {}
  double t() const { return t_; }
  const CatastropheReport& report() const { return report_; }
  const std::vector<Field1D>& last_state() const { return last_; }

private:
  double t_;
  CatastropheReport report_;
  std::vector<Field1D> last_;
};

// ------------------------------------------------------------- profiles

// Affine combinations of const, sin, gauss and poly, e.g.
//   "0.5 + sin(x)", "1 + 0.2*gauss(3.14, 0.5)", "-2*sin(2, 0.3)", "poly(0, -1)".
// sin(k, phase) = sin(k x + phase); gauss(c, w) = exp(-(x-c)^2 / w^2);
// poly(c0, c1, ...) = c0 + c1 x + ...; const(c) = c.
class Profile {
public:
  static Profile parse(const std::string& text);  // ConfigError
  static Profile constant(double c);

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;
  const std::string& text() const { return text_; }
  Field1D sample(const Grid1D& g, std::string label = "f") const;

private:
  struct Term {
    enum class Kind { constant, sine, gauss, poly } kind;
    double scale = 1;
    std::vector<double> args;
  };
  std::vector<Term> terms_;
  std::string text_;
};

// ------------------------------------------------------------ derivatives

// Centered 4th-order first derivative (one-sided near the ends when not periodic).
std::vector<double> derivative4(const std::vector<double>& f, const Grid1D& g);
double max_abs(const std::vector<double>& v);
double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b);
// max over fields of |forward difference| / dx, the gradient the solvers threshold on.
double max_one_sided_gradient(const std::vector<Field1D>& fields);

// ------------------------------------------------------ BH characteristics

// u_t + c u u_x = 0 (c = 3 for the BH equation in x3) by u = f0(xi),
// x = xi + c f0(xi) t. Newton with bisection fallback, tolerance 1e-13,
// 60 iterations.
struct CharacteristicOptions {
  double coeff = 3;
  double tol = 1e-13;
  int max_iter = 60;
};

struct CharacteristicSolution {
  Field1D u;
  Field1D u_x;      // exact, f0'(xi) / (1 + c t f0'(xi))
  std::vector<double> xi;
  CatastropheReport report;
};

// 1 / (c max(-f0')) for c > 0, or 1 / (|c| max(f0')) for c < 0; +inf if nothing breaks.
double breaking_time(const Profile& f0, const Grid1D& g, double coeff = 3);

// PastCatastrophe if t >= t_c, RootFindDiverged if a root is not found.
CharacteristicSolution solve_bh_characteristics(const Profile& f0, const Grid1D& g, double t,
                                                const CharacteristicOptions& opt = {});

// max |u_x| from 4th-order differences of the characteristic solution at each time.
std::vector<TracePoint> bh_gradient_trace(const Profile& f0, const Grid1D& g, const std::vector<double>& times,
                                          const CharacteristicOptions& opt = {});

// ----------------------------------------------------------- diagonal solver

struct DiagonalOptions {
  double cfl = 0.8;
  double threshold_factor = 1e3;  // CatastropheSignal when max grad exceeds this times the initial one
  std::size_t trace_every = 1;
  std::vector<double> snapshot_times;
};

struct DiagonalResult {
  std::vector<Field1D> fields;
  double t = 0;
  std::size_t steps = 0;
  std::vector<TracePoint> trace;
  std::vector<std::pair<double, std::vector<Field1D>>> snapshots;
  // Per recorded step, when a recorder is installed.
};

using StepRecorder = std::function<void(double t, const std::vector<Field1D>& fields)>;

// d gamma_i / d time = speed_i(gamma) d gamma_i / dx, first-order upwind by
// the sign of the speed, SSP-RK3 in time, dt = cfl dx / max|speed|.
DiagonalResult solve_diagonal(const DiagonalSystem& sys, const std::vector<Field1D>& init, double t_end,
                              const DiagonalOptions& opt = {}, const StepRecorder& record = {});

// --------------------------------------------------------- method of lines

// Any polynomial hydrodynamic system, space derivatives by derivative4, RK4
// in time with dt = cfl dx / (Gershgorin bound on the characteristic speeds).
struct MolOptions {
  double cfl = 0.4;
  std::vector<double> snapshot_times;
};

struct MolResult {
  std::vector<Field1D> fields;
  double t = 0;
  std::size_t steps = 0;
  std::vector<TracePoint> trace;
  std::vector<std::pair<double, std::vector<Field1D>>> snapshots;
};

MolResult solve_mol(const HydroSystem& sys, const std::vector<Field1D>& init, double t_end, const MolOptions& opt = {},
                    const StepRecorder& record = {});

// Pointwise evaluation of every rhs of a system, for checks and traces.
std::vector<std::vector<double>> evaluate_rhs(const HydroSystem& sys, const std::vector<Field1D>& fields);

// ---------------------------------------------------------------- Benney

struct BenneyTracePoint {
  double t = 0;
  double max_grad = 0;
  double delta = 0;  // at the probe point
  double g2 = 0;
  double g3 = 0;
  double min_abs_delta = 0;
};

struct BenneyResult {
  Field1D u, v;
  double t = 0;
  std::vector<BenneyTracePoint> trace;
  DiagonalResult riemann;
};

// Riemann invariants r+- = u +- 2 sqrt(v) with speeds u +- sqrt(v): the
// diagonal system in its own orientation (d r / dt = -speed d r / dx).
DiagonalSystem benney_riemann_system();

// Curve data of the u0 = 0 family: u2 = -u, u1 = u^2/4 - v.
struct ReducedCurve {
  double u2, u1, g2, g3, delta;
};
ReducedCurve benney_curve(double u, double v);

// VacuumState if v <= 0 anywhere (initially or along the run).
BenneyResult solve_benney(const Field1D& u0, const Field1D& v0, double t_end, const DiagonalOptions& opt = {},
                          std::size_t probe = static_cast<std::size_t>(-1), const StepRecorder& record = {});

// ---------------------------------------------------------- catastrophe

struct CatastropheFit {
  double t_c = 0;
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  std::size_t used = 0;
};

// Least squares of 1/max_grad against t on the final third of the trace.
// NoBlowupDetected with fewer than 5 samples or a non-decreasing fit.
CatastropheFit catastrophe_estimate(const std::vector<TracePoint>& trace);

// --------------------------------------------------------------- Hirota

// phi sampled on a tensor grid, rows along x3 (spacing h3), columns along x5.
// Residual phi33 phi55 - phi35^2 + phi33^3 on the interior (two-point margin).
Eigen::ArrayXXd hirota_residual(const Eigen::ArrayXXd& phi, double h3, double h5);

// Big-cell forms over (x1, x_k): with H^j_k = -(1/k) F_jk the relations read
//   F13 - (3/2) F11^2 = 0 (k = 3), F15 - (5/2) F11^3 = 0 (k = 5).
// `as_printed` evaluates F15 + (5/2) F11^3 instead.
Eigen::ArrayXXd hirota_residual_bh(const Eigen::ArrayXXd& F, double h1, double hk, int k, bool as_printed = false);

// Samples f(x3, x5) on x3 = a3 + i h3, x5 = a5 + j h5.
Eigen::ArrayXXd sample_2d(const std::function<double(double, double)>& f, double a3, double h3, std::size_t n3,
                          double a5, double h5, std::size_t n5);

// y^2 phi phi' + 4 (phi + 2 y phi')^3 pointwise.
std::vector<double> selfsimilar_ode_residual(const std::vector<double>& y, const std::vector<double>& phi,
                                             const std::vector<double>& dphi);
// Same with phi' from 4th-order differences on a uniform y grid.
std::vector<double> selfsimilar_ode_residual(const std::vector<double>& y, const std::vector<double>& phi);

// The monomial solution phi = -x3^4 / (216 x5^2) and its exact jets.
struct PhiJets {
  double phi33, phi35, phi55;
};
double selfsimilar_phi(double x3, double x5);
PhiJets selfsimilar_jets(double x3, double x5);

// H^3_1 = phi33, H^3_{-1} = -phi35 / (2 phi33), u2 = -phi35/phi33,
// u1 = 2 phi33 + phi35^2 / (4 phi33^2), g2, g3.
struct DnlsCurve {
  double H31, H3m1, u2, u1, g2, g3;
};
DnlsCurve dnls_curve(const PhiJets& j);

// ------------------------------------------------------- cocycle traces

struct CocycleTracePoint {
  double t = 0;
  double max_grad = 0;
  double sup_psi = 0;
  double sup_f = 0;
};

struct CocycleTraceSummary {
  std::vector<CocycleTracePoint> trace;
  double correlation = 0;         // log sup|psi| vs log max|u_x| over the final decade
  std::size_t decade_samples = 0;
  bool monotone_final_tenth = false;
};

// BH run on the characteristic solution. The variation is
// dF = sum_m alpha_m dF/dx_{2m+1} (alpha keyed by m, default x3 only), so
// dH^a_b = sum_m alpha_m d H^a_b / dx_{2m+1} by the BH hierarchy. psi_0 is
// taken over (j,k) in {0,1}^2, f_0 over j in {0,1}. Times run geometrically
// towards t_c until max|u_x| passes threshold_factor times its initial value.
// Samples are taken at the characteristic feet xi = grid nodes.
CocycleTraceSummary bh_cocycle_trace(const Profile& f0, const Grid1D& g, std::size_t samples = 200,
                                     double threshold_factor = 1e3, const std::map<int, double>& alpha = {{1, 1.0}});

// Benney run with the dNLS cocycle psi_1(p_3,p_3) along the x-translation
// variation (du, dv) = (u_x, v_x).
CocycleTraceSummary benney_cocycle_trace(const Field1D& u0, const Field1D& v0, double t_end,
                                         const DiagonalOptions& opt = {});

// Pearson correlation of log y against log x over samples with x in
// [x_last / 10, x_last].
double final_decade_correlation(const std::vector<double>& x, const std::vector<double>& y, std::size_t* used = nullptr);
bool monotone_over_final_fraction(const std::vector<double>& y, double fraction = 0.1);

// Symbolic helpers reused by the traces.
// H^a_b of the big cell as a polynomial in H[1][1].
MultiPoly big_cell_H(int a, int b);

}  // namespace birkhoff
