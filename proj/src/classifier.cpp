#include "jlflux/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jlflux/error.hpp"
#include "jlflux/spectrum.hpp"

namespace jlflux {

const char* to_string(JLClass c) {
  switch (c) {
    case JLClass::Supercritical: return "Supercritical";
    case JLClass::Critical: return "Critical";
    case JLClass::Subcritical: return "Subcritical";
  }
  return "?";
}

namespace {

void require_critical_range(const ProblemParams& params, const DerivedConstants& c) {
  // q_crit itself is admitted; allow the rounding of its closed form.
  if (params.q < c.q_crit * (1.0 - 1e-15)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "classification needs q >= (n-a)/(n+a-2) = " << c.q_crit << " (got q = " << params.q << ")";
    fail_validation("classifier.q_below_critical", msg.str());
  }
}

}  // namespace

ModalRoots modal_roots(double lambda, const DerivedConstants& c) {
  ModalRoots r{};
  r.discriminant = c.sigma * c.sigma + 4.0 * (c.gamma + lambda);
  if (r.discriminant >= 0.0) {
    const double s = std::sqrt(r.discriminant);
    r.real = true;
    r.rho_minus = 0.5 * (-c.sigma - s);
    r.rho_plus = 0.5 * (-c.sigma + s);
    r.real_part = r.rho_plus;
    r.imag_part = 0.0;
  } else {
    r.real = false;
    r.rho_minus = r.rho_plus = -0.5 * c.sigma;
    r.real_part = -0.5 * c.sigma;
    r.imag_part = 0.5 * std::sqrt(-r.discriminant);
  }
  return r;
}

double jl_functional(const ProblemParams& params, AngularGrid grid) {
  const auto c = derive(params);
  const auto V = singular_profile(params, c, grid);
  SpectrumOptions opt;
  opt.grid = grid;
  const double ca = SpectrumSolver(params.n, params.a, opt).compute_Ca();
  return ca - params.q * std::pow(V.boundary_value(), params.q - 1.0);
}

double jl_threshold(int n, double a, double q_lo, double q_hi, double q_tol, AngularGrid grid) {
  if (!(q_lo < q_hi)) fail_validation("classifier.bad_interval", "need q_lo < q_hi");
  SpectrumOptions opt;
  opt.grid = grid;
  const double ca = SpectrumSolver(n, a, opt).compute_Ca();
  auto J = [&](double q) {
    const ProblemParams p{n, a, q};
    const auto V = singular_profile(p, derive(p), grid);
    return ca - q * std::pow(V.boundary_value(), q - 1.0);
  };
  double jl = J(q_lo), jh = J(q_hi);
  if (jl == 0.0) return q_lo;
  if (jh == 0.0) return q_hi;
  if ((jl > 0) == (jh > 0))
    fail_numerical("classifier.no_sign_change", "J does not change sign on the interval");
  while (q_hi - q_lo > q_tol * q_hi) {
    const double mid = 0.5 * (q_lo + q_hi);
    if (mid <= q_lo || mid >= q_hi) break;
    const double jm = J(mid);
    if (jm == 0.0) return mid;
    if ((jm > 0) == (jl > 0)) {
      q_lo = mid;
      jl = jm;
    } else {
      q_hi = mid;
    }
  }
  return 0.5 * (q_lo + q_hi);
}

JLReport jl_classify(const ProblemParams& params, ClassifyOptions options) {
  JLReport r;
  r.params = params;
  r.constants = derive(params);
  r.tolerance = options.tolerance;
  const auto& c = r.constants;
  require_critical_range(params, c);

  SpectrumOptions sopt;
  sopt.grid = options.grid;
  const SpectrumSolver solver(params.n, params.a, sopt);
  const auto V = singular_profile(params, c, options.grid);
  r.V_B = V.boundary_value();
  r.C_a = solver.compute_Ca();
  r.beta = params.q * std::pow(r.V_B, params.q - 1.0);
  r.J = r.C_a - r.beta;
  const auto pairs = solver.eigenpairs(r.beta, 2);
  r.lambda1 = pairs[0].lambda;
  r.lambda2 = pairs[1].lambda;
  const auto m1 = modal_roots(r.lambda1, c);
  const auto m2 = modal_roots(r.lambda2, c);
  r.discriminant1 = m1.discriminant;
  r.discriminant2 = m2.discriminant;

  if (r.J > options.tolerance) r.jl_class = JLClass::Supercritical;
  else if (r.J < -options.tolerance) r.jl_class = JLClass::Subcritical;
  else r.jl_class = JLClass::Critical;

  const double d = effective_dimension(params.n, params.a);
  const double band = 1e-7 * std::max(1.0, d * d);
  if (r.jl_class != JLClass::Critical && ((r.J > 0) ? 1.0 : -1.0) * r.discriminant1 < -band) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "J = " << r.J << " but sigma^2 + 4(gamma + lambda1) = " << r.discriminant1;
    fail_numerical("classifier.inconsistent_signs", msg.str());
  }

  switch (r.jl_class) {
    case JLClass::Supercritical:
      r.rho1_plus = m1.rho_plus;
      r.rho1_minus = m1.rho_minus;
      r.rho1 = std::abs(m1.rho_plus);
      break;
    case JLClass::Critical:
      r.rho1_plus = r.rho1_minus = -0.5 * c.sigma;
      r.rho1 = 0.5 * c.sigma;
      break;
    case JLClass::Subcritical:
      r.K = 0.5 * std::sqrt(std::max(0.0, -r.discriminant1));
      break;
  }
  if (!m2.real) fail_numerical("classifier.complex_second_mode", "second modal roots are complex");
  r.rho2 = 0.5 * (c.sigma + std::sqrt(r.discriminant2));
  return r;
}

double g_function(int n, double a, double tau) {
  const double d = effective_dimension(n, a);
  return (1.0 - a + tau) * (d - tau) - d * d / 4.0;
}

GAnalysis g_analysis(int n, double a) {
  if (n < 3) fail_validation("classifier.n_too_small", "n must be >= 3");
  if (!(a > -1.0 && a < 0.0)) fail_validation("classifier.a_out_of_range", "a must lie in (-1, 0)");
  GAnalysis g;
  const double d = effective_dimension(n, a);
  g.tau_lo = 0.0;
  g.tau_hi = d / 2.0;
  // Candidates: both ends and the vertex (a maximum, kept for robustness).
  const double vertex = std::clamp(0.5 * (d - (1.0 - a)), g.tau_lo, g.tau_hi);
  g.inf_location = g.tau_lo;
  g.inf_value = g_function(n, a, g.tau_lo);
  for (double t : {vertex, g.tau_hi}) {
    const double v = g_function(n, a, t);
    if (v < g.inf_value) {
      g.inf_value = v;
      g.inf_location = t;
    }
  }
  return g;
}

}  // namespace jlflux
