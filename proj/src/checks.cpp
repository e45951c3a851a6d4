#include "jlflux/checks.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "jlflux/angular_profile.hpp"
#include "jlflux/classifier.hpp"
#include "jlflux/cylinder.hpp"
#include "jlflux/error.hpp"
#include "jlflux/modal.hpp"
#include "jlflux/quadrature.hpp"
#include "jlflux/spectrum.hpp"

namespace jlflux {

namespace {

using Clock = std::chrono::steady_clock;
using Kind = Measurement::Kind;

constexpr double kHalfPi = std::numbers::pi / 2;
constexpr double kWeights[] = {-0.9, -0.5, -0.1};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel(double x, double y) { return std::abs(x - y) / std::abs(y); }

// Double-exponential quadrature of f(theta) sin^{n-2} cos^a over (0, pi/2),
// with cos taken from the endpoint distance.
template <class F>
double adaptive_integral(F f, int n, double a) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto g = [&](double x, double xc) {
    const double phi = (xc > 0) ? xc : kHalfPi - x;
    return f(x, phi) * std::pow(std::sin(x), n - 2) * std::pow(std::sin(phi), a);
  };
  return ts.integrate(g, 0.0, kHalfPi, 1e-15);
}

CheckResult quadrature_mass() {
  CheckResult r;
  const auto t0 = Clock::now();
  double adaptive = 0, rule = 0, composite = 0;
  for (int n = 3; n <= 10; ++n)
    for (double a : kWeights) {
      const double beta = 0.5 * std::beta(0.5 * (n - 1), 0.5 * (a + 1));
      adaptive = std::max(adaptive, rel(adaptive_integral([](double, double) { return 1.0; }, n, a), beta));
      rule = std::max(rule, rel(WeightedMeasure::jacobi(n, a).total_mass(), beta));
      composite = std::max(composite, rel(WeightedMeasure::composite(n, a).total_mass(), beta));
    }
  r.seconds = seconds_since(t0);
  r.items = {{"adaptive vs Beta", adaptive, 1e-10},
             {"Gauss-Jacobi vs Beta", rule, 1e-10},
             {"composite vs Beta", composite, 1e-10},
             {"runtime s", r.seconds, 1.0}};
  r.note = "n = 3..10, a in {-0.9, -0.5, -0.1}";
  return r;
}

CheckResult sine_power_gap() {
  CheckResult r;
  double worst = -1e300, direct_worst = -1e300;
  for (int n = 3; n <= 10; ++n)
    for (double a : kWeights) {
      worst = std::max(worst, lemma1_gap(n, a));
      const double direct = adaptive_integral(
          [&](double x, double phi) {
            return std::pow(std::sin(x), a) / std::pow(std::sin(phi), a) - 1.0;
          },
          n, a);
      direct_worst = std::max(direct_worst, direct);
    }
  r.items = {{"max gap", worst, 0.0}, {"max gap, direct integral", direct_worst, 0.0}};
  r.note = "n = 3..10, a in {-0.9, -0.5, -0.1}";
  return r;
}

CheckResult trace_constant_bound() {
  CheckResult r;
  double margin = 1e300;
  for (int n = 4; n <= 10; ++n)
    for (double a : kWeights) margin = std::min(margin, compute_Ca(n, a) - 0.5 * (n + a - 3));
  r.items = {{"min C_a - (n+a-3)/2", margin, 0.0, Kind::Above}};
  r.note = "n = 4..10, a in {-0.9, -0.5, -0.1}";
  return r;
}

// q = 2 q_crit lies above q_sing, so gamma > 0.
ProblemParams grid_params(int n, double a) { return {n, a, 2.0 * derive({n, a, 2.0}).q_crit}; }

CheckResult spectral_exactness() {
  CheckResult r;
  double hardy = 0, profile = 0, vector = 0;
  for (int n : {3, 4, 6, 8, 10})
    for (double a : kWeights) {
      const double d = n + a - 2;
      SpectrumSolver solver(n, a);
      const double ca = solver.compute_Ca();
      hardy = std::max(hardy, rel(solver.eigenpairs(ca, 1)[0].lambda, -d * d / 4));

      const ProblemParams prm = grid_params(n, a);
      const auto c = derive(prm);
      const auto V = singular_profile(prm, c);
      const auto first = solver.eigenpairs(std::pow(V.boundary_value(), prm.q - 1), 1)[0];
      profile = std::max(profile, rel(first.lambda, -c.gamma));
      const double vn = norm([&](double t) { return V.value(t); }, solver.measure());
      vector = std::max(vector, norm([&](double t) { return first.profile.value(t) - V.value(t) / vn; },
                                     solver.measure()));
    }
  r.items = {{"beta = C_a: lambda1 vs -(n+a-2)^2/4", hardy, 1e-8},
             {"beta = V_B^(q-1): lambda1 vs -gamma", profile, 1e-8},
             {"e1 vs V/|V| weighted L2", vector, 1e-6}};
  r.note = "n in {3, 4, 6, 8, 10}, a in {-0.9, -0.5, -0.1}, q = 2 q_crit";
  return r;
}

CheckResult flux_identity() {
  CheckResult r;
  double worst = 0;
  for (int n = 3; n <= 10; ++n)
    for (double a : kWeights) {
      const ProblemParams prm = grid_params(n, a);
      const auto c = derive(prm);
      const auto V = singular_profile(prm, c);
      const auto mu = WeightedMeasure::composite(n, a);
      const double vbq = std::pow(V.boundary_value(), prm.q);
      const double mean = weighted_integral([&](double t) { return V.value(t); }, mu);
      worst = std::max(worst, std::abs(vbq - c.gamma * mean) / vbq);
    }
  r.items = {{"|V_B^q - gamma int V| / V_B^q", worst, 1e-8}};
  r.note = "n = 3..10, a in {-0.9, -0.5, -0.1}, q = 2 q_crit";
  return r;
}

CheckResult trichotomy() {
  CheckResult r;
  double gap1 = -1e300, lambda2 = 1e300;
  int mismatches = 0, super = 0, sub = 0, low_dim = 0;
  for (int n : {8, 10, 12, 15})
    for (double a : {-0.5, -0.2})
      for (double f : {1.0, 1.3, 1.6, 2.0, 2.5, 3.0, 4.0, 6.0}) {
        const ProblemParams prm{n, a, f * derive({n, a, 2.0}).q_crit};
        try {
          const auto rep = jl_classify(prm);
          gap1 = std::max(gap1, rep.lambda1 + rep.constants.gamma);
          lambda2 = std::min(lambda2, rep.lambda2);
          if ((rep.discriminant1 > 0) != (rep.J > 0)) ++mismatches;
          if (rep.jl_class == JLClass::Supercritical) ++super;
          if (rep.jl_class == JLClass::Subcritical) ++sub;
        } catch (const Error& e) {
          if (e.code() != "classifier.inconsistent_signs") throw;
          ++mismatches;
        }
      }
  // the threshold itself: J = 0 to bisection accuracy, repeated root
  const auto critical = jl_classify({12, -0.5, jl_threshold(12, -0.5, 2.632, 3.947)});
  const double critical_disc = std::abs(critical.discriminant1) / std::pow(critical.constants.sigma, 2);
  for (int n = 3; n <= 6; ++n)
    for (double a : kWeights)
      for (double f : {1.0, 1.5, 2.5, 3.5, 5.0}) {
        const auto rep = jl_classify({n, a, f * derive({n, a, 2.0}).q_crit});
        if (rep.jl_class != JLClass::Subcritical) ++low_dim;
      }
  r.items = {{"max lambda1 + gamma", gap1, 0.0},
             {"min lambda2", lambda2, 0.0, Kind::Above},
             {"sign(disc1) != sign(J)", double(mismatches), 0.0, Kind::AtMost},
             {"supercritical cases", double(super), 0.0, Kind::Above},
             {"subcritical cases", double(sub), 0.0, Kind::Above},
             {"threshold |disc1| / sigma^2", critical_disc, 1e-6},
             {"threshold not critical", critical.jl_class == JLClass::Critical ? 0.0 : 1.0, 0.0, Kind::AtMost},
             {"n = 3..6 not subcritical", double(low_dim), 0.0, Kind::AtMost}};
  r.note = "sweep n in {8, 10, 12, 15}, a in {-0.5, -0.2}, q/q_crit in [1, 6]; threshold at n = 12, a = -0.5; n = 3..6 at q/q_crit in [1, 5]";
  return r;
}

CheckResult eigenvalue_growth() {
  CheckResult r;
  struct Case {
    int n;
    double a;
    double beta;
  };
  const ProblemParams p3 = grid_params(3, -0.9);
  const auto V3 = singular_profile(p3, derive(p3));
  const std::vector<Case> cases = {
      {3, -0.9, p3.q * std::pow(V3.boundary_value(), p3.q - 1)},
      {6, -0.5, compute_Ca(6, -0.5)},
      {12, -0.1, 0.0},
  };
  double spread = 0, lowest = 1e300;
  for (const auto& c : cases) {
    const auto pairs = eigenpairs(c.beta, c.n, c.a, 20);
    double lo = 1e300, hi = -1e300;
    for (int i = 4; i <= 20; ++i) {
      const double ratio = pairs[i - 1].lambda / (i * i);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    lowest = std::min(lowest, lo);
    spread = std::max(spread, hi / lo);
  }
  r.items = {{"min lambda_i / i^2", lowest, 0.0, Kind::Above},
             {"max / min of lambda_i / i^2", spread, 3.0}};
  r.note = "i = 4..20; (n, a, beta) = (3, -0.9, q V_B^(q-1) at q = 2 q_crit), (6, -0.5, C_a), (12, -0.1, 0)";
  return r;
}

DerivedConstants constants_with(double sigma, double gamma) {
  DerivedConstants c{};
  c.sigma = sigma;
  c.gamma = gamma;
  return c;
}

CheckResult duhamel_direct() {
  CheckResult r;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0;
  for (JLClass cls : {JLClass::Supercritical, JLClass::Critical, JLClass::Subcritical})
    for (int k = 0; k < 20; ++k) {
      const auto c = constants_with(0.5 + 2.5 * U(rng), 0.2 + 2 * U(rng));
      double lambda = -c.gamma - c.sigma * c.sigma / 4;
      if (cls == JLClass::Supercritical) lambda += (0.05 + 0.9 * U(rng)) * c.sigma * c.sigma / 4;
      if (cls == JLClass::Subcritical) lambda -= 0.1 + 3 * U(rng);
      const double A = 2 * U(rng) - 1, mu = 0.2 + 2 * U(rng), om = 3 * U(rng);
      const Forcing f = [=](double t) { return A * std::exp(-mu * t) * std::cos(om * t); };
      const double z0 = 2 * U(rng) - 1, z1 = 2 * U(rng) - 1;
      const auto d = duhamel_solution(1, lambda, z0, z1, f, c, cls);
      const auto o = ode_direct(1, lambda, z0, z1, f, c);
      for (std::size_t j = 0; j < d.z.size(); ++j) worst = std::max(worst, std::abs(d.z[j] - o.z[j]));
    }
  r.seconds = seconds_since(t0);
  r.items = {{"max |Duhamel - RK4|", worst, 1e-7}, {"runtime s", r.seconds, 10.0}};
  r.note = "20 seeded cases per class on [0, 20]";
  return r;
}

// Two-point solution of z'' + sigma z' - (gamma + lambda) z = 0 with z(0) = 1
// and z(T) = 0. The first mode goes through the Duhamel form of its class.
std::vector<double> two_point_mode(int i, double lambda, const JLReport& rep, int steps, double T) {
  const auto zero = [](double) { return 0.0; };
  const TimeGrid tg{T, steps};
  std::vector<double> z(steps + 1);
  if (i == 1) {
    const auto za = duhamel_solution(1, lambda, 1.0, 0.0, zero, rep.constants, rep.jl_class, tg);
    const auto zb = duhamel_solution(1, lambda, 0.0, 1.0, zero, rep.constants, rep.jl_class, tg);
    const double slope = -za.z.back() / zb.z.back();
    for (int j = 0; j <= steps; ++j) z[j] = za.z[j] + slope * zb.z[j];
    return z;
  }
  const auto roots = modal_roots(lambda, rep.constants);
  const double lo = roots.rho_minus, hi = roots.rho_plus;
  const double A = 1.0 / (1.0 - std::exp((lo - hi) * T));
  for (int j = 0; j <= steps; ++j) {
    const double t = T * j / steps;
    z[j] = A * (std::exp(lo * t) - std::exp(lo * T + hi * (t - T)));
  }
  return z;
}

CheckResult linearized_modes() {
  CheckResult r;
  const ProblemParams p{12, -0.5, 6.0};
  const auto rep = jl_classify(p);
  const auto pairs = eigenpairs(rep.beta, p.n, p.a, 2);
  const std::vector<AngularProfile> profiles = {pairs[0].profile, pairs[1].profile};
  const int steps = 1600, cells = 256;
  const double T = 20.0;

  double err[2] = {0, 0}, leak[2] = {0, 0};
  for (int i = 0; i < 2; ++i) {
    std::vector<CylinderField> runs;
    for (int level = 0; level < 2; ++level) {
      CylinderOptions o;
      o.grid = {steps << level, cells << level, T, 0.0};
      const ThetaMesh m = make_theta_mesh(p.n, p.a, o.grid.theta_cells);
      std::vector<double> lw(m.nodes());
      for (int k = 0; k < m.nodes(); ++k) lw[k] = pairs[i].profile.value(m.theta[k]);
      runs.push_back(solve_linearized(p, lw, o));
    }
    const auto& coarse = runs[0];
    const auto& fine = runs[1];
    const auto& m = coarse.mesh;
    const auto z = two_point_mode(i + 1, pairs[i].lambda, rep, steps, T);
    // Richardson combination on the coarse nodes, mu-weighted L2 per slice
    double e_max = 0, n_max = 0;
    for (int j = 0; j <= steps; ++j) {
      double e2 = 0, n2 = 0;
      for (int k = 0; k < m.nodes(); ++k) {
        const double ex = z[j] * pairs[i].profile.value(m.theta[k]);
        const double w = (4 * fine.at(2 * j, 2 * k) - coarse.at(j, k)) / 3;
        e2 += m.mass[k] * (w - ex) * (w - ex);
        n2 += m.mass[k] * ex * ex;
      }
      e_max = std::max(e_max, std::sqrt(e2));
      n_max = std::max(n_max, std::sqrt(n2));
    }
    err[i] = e_max / n_max;
    const auto pc = project_modes(coarse, profiles);
    const auto pf = project_modes(fine, profiles);
    const int other = 1 - i;
    double l = 0, top = 0;
    for (int j = 0; j <= steps; ++j) {
      l = std::max(l, std::abs((4 * pf[other].z[2 * j] - pc[other].z[j]) / 3));
      top = std::max(top, std::abs(z[j]));
    }
    leak[i] = l / top;
  }
  r.items = {{"mode 1 relative L2 error", err[0], 1e-6},
             {"mode 2 relative L2 error", err[1], 1e-6},
             {"leakage mode 1 -> 2", leak[0], 1e-6},
             {"leakage mode 2 -> 1", leak[1], 1e-6}};
  r.note = "n = 12, a = -0.5, q = 6, T = 20, Dirichlet right; grids 1600x256 and 3200x512, Richardson";
  return r;
}

// Fit window from the first level where |z| drops below hi * max |z| to the
// last level where |z| exceeds lo.
FitWindow magnitude_window(const std::vector<double>& z, double hi, double lo) {
  double top = 0;
  for (double x : z) top = std::max(top, std::abs(x));
  const int n = static_cast<int>(z.size());
  int b = 0;
  while (b < n && std::abs(z[b]) > hi * top) ++b;
  int e = b;
  for (int k = b; k < n; ++k)
    if (std::abs(z[k]) > lo) e = k;
  FitWindow w;
  w.transient_fraction = double(b) / (n - 1);
  w.end_fraction = double(e) / (n - 1);
  return w;
}

std::vector<ModalTrajectory> first_modes(const CylinderField& f, const ProblemParams& p) {
  const auto modes = discrete_modes(f.mesh, p.q * std::pow(f.singular.back(), p.q - 1));
  return project_modes(f, modes, 1);
}

std::string describe(const char* label, const ProblemParams& p, const JLReport& rep) {
  std::ostringstream os;
  os << label << " (n=" << p.n << ", a=" << p.a << ", q=" << p.q << ": " << to_string(rep.jl_class) << ")";
  return os.str();
}

CheckResult decay_rates() {
  CheckResult r;
  std::ostringstream note;
  const double q0 = jl_threshold(12, -0.5, 2.632, 3.947);

  // supercritical and critical: whole-line runs, where every decaying mode
  // takes its own root and no right condition amplifies it
  for (double q : {6.0, q0}) {
    const ProblemParams p{12, -0.5, q};
    const auto rep = jl_classify(p);
    CylinderOptions o;
    o.left = LeftCondition::RegularOrigin;
    o.right = RightCondition::Asymptotic;
    const auto t0 = Clock::now();
    const auto f = solve_nonlinear(p, o);
    const auto z = first_modes(f, p)[0];
    const auto w = magnitude_window(z.z, 1e-4, 1e-10);
    const double secs = seconds_since(t0);
    if (q == 6.0) {
      const auto fit = fit_pure_exponential(z.t, z.z, w);
      const double rho1 = rep.rho1.value_or(0.0);
      r.items.push_back({"supercritical rate vs rho1", rel(-fit.rate, rho1), 0.02});
      r.items.push_back({"supercritical runtime s", secs, 60.0});
      note << describe("super", p, rep) << " rate " << -fit.rate << " vs " << rho1 << "; ";
    } else {
      const auto fit = fit_linear_times_exponential(z.t, z.z, rep.constants.sigma, w);
      r.items.push_back({"critical xi1", fit.xi1, 0.0, Kind::Above});
      r.items.push_back({"critical runtime s", secs, 60.0});
      note << describe("critical", p, rep) << "; ";
    }
  }

  // subcritical: left data 0.99 V, Dirichlet right
  {
    const ProblemParams p{5, -0.5, 3.3};
    const auto rep = jl_classify(p);
    const auto t0 = Clock::now();
    const auto f = solve_nonlinear(p, CylinderOptions{});
    const auto z = first_modes(f, p)[0];
    FitWindow w;
    w.transient_fraction = 0.3;
    w.end_fraction = 0.9;
    const auto fit = fit_oscillatory_free(z.t, z.z, w);
    const double secs = seconds_since(t0);
    const double K = rep.K.value_or(0.0);
    r.items.push_back({"subcritical frequency vs K", rel(fit.frequency, K), 0.01});
    r.items.push_back({"subcritical runtime s", secs, 60.0});
    note << describe("sub", p, rep) << " frequency " << fit.frequency << " vs " << K;
  }
  r.note = note.str();
  return r;
}

double max_energy_residual(const CylinderField& f) {
  const auto E = energy_trace(f);
  double m = 0;
  for (double x : E.residual) m = std::max(m, std::abs(x));
  return m;
}

CheckResult energy_identity() {
  CheckResult r;
  // Whole-line runs are smooth up to both ends. Data 0.99 V break the flux
  // condition at t = 0, and the corner layer they start is only resolved once
  // h is small against the stiffest discrete mode.
  const ProblemParams super{12, -0.5, 6.0};
  std::vector<double> res;
  for (int steps : {200, 400, 800}) {
    CylinderOptions o;
    o.left = LeftCondition::RegularOrigin;
    o.right = RightCondition::Asymptotic;
    o.grid.t_steps = steps;
    res.push_back(max_energy_residual(solve_nonlinear(super, o)));
  }
  const ProblemParams sub{5, -0.5, 3.3};
  CylinderOptions o;
  const ThetaMesh m = make_theta_mesh(sub.n, sub.a, o.grid.theta_cells);
  o.left_data = discrete_singular_profile(m, sub.q, derive(sub).gamma);
  const auto E = energy_trace(solve_nonlinear(sub, o));
  double drift = 0;
  for (double e : E.energy) drift = std::max(drift, std::abs(e - E.energy.front()));
  r.items = {{"residual ratio h -> h/2", res[0] / res[1], 3.5, Kind::Above},
             {"residual ratio h/2 -> h/4", res[1] / res[2], 3.5, Kind::Above},
             {"stationary energy drift", drift, 1e-10}};
  std::ostringstream os;
  os << "identity: n = 12, a = -0.5, q = 6 whole-line, T = 20, 64 cells, max residual " << res[0] << ", "
     << res[1] << ", " << res[2] << " at 200, 400, 800 steps; stationary: n = 5, q = 3.3, default grid";
  r.note = os.str();
  return r;
}

CheckResult scaling_and_decay() {
  CheckResult r;
  const ProblemParams sub{5, -0.5, 3.3};
  CylinderOptions o;
  const auto f1 = solve_nonlinear(sub, o);
  const int shift = 7;
  auto os = o;
  os.grid.t_begin = -shift * f1.step();
  const auto fs = solve_nonlinear(sub, os);
  const double m = f1.constants.m_q;
  const auto ub = scale_physical(to_physical(f1), m, shift);
  const auto ud = to_physical(fs);
  const int N = f1.nodes();
  double worst = 0;
  for (std::size_t j = 0; j < ub.r.size(); ++j)
    for (int k = 0; k < N; ++k) {
      const double direct = ud.u[(j + shift) * N + k];
      worst = std::max(worst, std::abs(ub.u[j * N + k] - direct) / direct);
    }

  const ProblemParams super{12, -0.5, 6.0};
  double bound[2];
  for (int d = 0; d < 2; ++d) {
    CylinderOptions w;
    w.left = LeftCondition::RegularOrigin;
    w.right = RightCondition::Asymptotic;
    w.grid.horizon = 20.0 * (1 << d);
    w.grid.t_steps = 400 * (1 << d);
    const auto f = solve_nonlinear(super, w);
    bound[d] = decay_bound(to_physical(f), f.constants.m_q);
  }
  r.items = {{"scaled vs translated, max relative", worst, 1e-12},
             {"decay bound drift T -> 2T", rel(bound[1], bound[0]), 0.05}};
  std::ostringstream note;
  note << "scaling: n = 5, q = 3.3, shift 7 levels; bound: n = 12, q = 6 whole-line, T = 20 and 40 at h = 0.05, "
       << "sup u (1+r)^m_q = " << bound[0] << ", " << bound[1];
  r.note = note.str();
  return r;
}

struct Entry {
  CheckInfo info;
  std::function<CheckResult()> run;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> list = {
      {{1, "quadrature mass identity", "quadrature"}, quadrature_mass},
      {{2, "sine power gap is negative", "quadrature"}, sine_power_gap},
      {{3, "trace constant lower bound", "spectrum"}, trace_constant_bound},
      {{4, "spectral exactness", "spectrum"}, spectral_exactness},
      {{5, "flux identity", "spectrum"}, flux_identity},
      {{6, "trichotomy signs", "classifier"}, trichotomy},
      {{7, "eigenvalue growth", "spectrum"}, eigenvalue_growth},
      {{8, "Duhamel vs direct ODE", "modal"}, duhamel_direct},
      {{9, "linearized cylinder vs modal closed form", "cylinder"}, linearized_modes},
      {{10, "decay rates", "cylinder"}, decay_rates},
      {{11, "energy identity", "cylinder"}, energy_identity},
      {{12, "scaling and decay bound", "cylinder"}, scaling_and_decay},
  };
  return list;
}

}  // namespace

bool Measurement::passed() const {
  if (!std::isfinite(value)) return false;
  switch (kind) {
    case Kind::Below: return value < bound;
    case Kind::Above: return value > bound;
    case Kind::AtMost: return value <= bound;
  }
  return false;
}

bool CheckResult::passed() const {
  if (!error.empty() || items.empty()) return false;
  return std::all_of(items.begin(), items.end(), [](const Measurement& m) { return m.passed(); });
}

const std::vector<CheckInfo>& check_catalog() {
  static const std::vector<CheckInfo> list = [] {
    std::vector<CheckInfo> out;
    for (const auto& e : entries()) out.push_back(e.info);
    return out;
  }();
  return list;
}

CheckResult run_check(int id) {
  const auto& list = entries();
  const auto it = std::find_if(list.begin(), list.end(), [id](const Entry& e) { return e.info.id == id; });
  if (it == list.end()) fail_validation("checks.unknown_check", "no check with id " + std::to_string(id));
  const auto t0 = Clock::now();
  CheckResult r;
  try {
    r = it->run();
  } catch (const Error& e) {
    r.error = e.what();
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.id = id;
  r.name = it->info.name;
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<int> suite_members(std::string_view suite) {
  std::vector<int> ids;
  for (const auto& c : check_catalog())
    if (suite == "all" || suite == c.suite) ids.push_back(c.id);
  if (ids.empty())
    fail_validation("checks.unknown_suite", "unknown suite '" + std::string(suite) +
                                                "'; expected quadrature, spectrum, classifier, modal, cylinder or all");
  return ids;
}

std::string format_check(const CheckResult& result) {
  std::ostringstream os;
  os.precision(3);
  os << (result.passed() ? "PASS " : "FAIL ") << (result.id < 10 ? " " : "") << result.id << " " << result.name << ": ";
  if (!result.error.empty()) os << "error " << result.error << "; ";
  for (std::size_t i = 0; i < result.items.size(); ++i) {
    const auto& m = result.items[i];
    const char* op = m.kind == Measurement::Kind::Below ? " < " : m.kind == Measurement::Kind::Above ? " > " : " <= ";
    os << (i ? "; " : "") << m.label << " " << m.value << op << m.bound << (m.passed() ? "" : " [violated]");
  }
  os.precision(2);
  os << " (" << std::fixed << result.seconds << " s)";
  return os.str();
}

}  // namespace jlflux
