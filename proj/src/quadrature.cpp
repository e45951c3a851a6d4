#include "jlflux/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <sstream>

#include "jlflux/error.hpp"

namespace jlflux {

namespace {

double log_beta(double x, double y) { return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y); }

// theta from u = sin^2(theta) and t = 1 - u, whichever is better conditioned.
double theta_of(double u, double t) {
  if (u <= 0.5) return std::asin(std::sqrt(u));
  return std::acos(std::sqrt(t));
}

void check_measure_args(int n, double a) {
  if (n < 3) fail_validation("quadrature.n_too_small", "n must be >= 3");
  if (!(a > -1.0 && a < 1.0)) fail_validation("quadrature.a_out_of_range", "a must lie in (-1, 1)");
}

}  // namespace

GaussRule gauss_jacobi(int order, double alpha, double beta) {
  if (order < 1) fail_validation("quadrature.bad_order", "order must be >= 1");
  if (!(alpha > -1.0 && beta > -1.0))
    fail_validation("quadrature.bad_exponent", "Jacobi exponents must exceed -1");

  const double ab = alpha + beta;
  Eigen::VectorXd diag(order);
  Eigen::VectorXd off(std::max(order - 1, 0));
  for (int k = 0; k < order; ++k) {
    if (k == 0) {
      diag(k) = (beta - alpha) / (ab + 2.0);
    } else {
      const double s = 2.0 * k + ab;
      diag(k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    }
  }
  for (int k = 1; k < order; ++k) {
    double b2;
    if (k == 1) {
      b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      const double s = 2.0 * k + ab;
      b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    off(k - 1) = std::sqrt(b2);
  }

  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + log_beta(alpha + 1.0, beta + 1.0));
  if (order == 1) {
    rule.nodes[0] = diag(0);
    rule.weights[0] = mu0;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    fail_numerical("quadrature.eigensolver_failed", "tridiagonal eigensolver did not converge");
  for (int k = 0; k < order; ++k) {
    const double v0 = solver.eigenvectors()(0, k);
    rule.nodes[k] = solver.eigenvalues()(k);
    rule.weights[k] = mu0 * v0 * v0;
  }
  return rule;
}

WeightedMeasure::WeightedMeasure(int n, double a, std::vector<double> theta,
                                 std::vector<double> weights)
    : n_(n), a_(a), theta_(std::move(theta)), weights_(std::move(weights)) {}

double WeightedMeasure::total_mass() const noexcept {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

WeightedMeasure WeightedMeasure::jacobi(int n, double a, int order) {
  check_measure_args(n, a);
  // x in [-1,1], u = (1+x)/2; (1-x) carries (a-1)/2, (1+x) carries (n-3)/2.
  const double alpha = 0.5 * (a - 1.0);
  const double beta = 0.5 * (n - 3.0);
  const GaussRule rule = gauss_jacobi(order, alpha, beta);
  const double scale = 0.5 * std::pow(0.5, alpha + beta + 1.0);
  std::vector<double> theta(order), w(order);
  for (int k = 0; k < order; ++k) {
    const double x = rule.nodes[k];
    theta[k] = theta_of(0.5 * (1.0 + x), 0.5 * (1.0 - x));
    w[k] = scale * rule.weights[k];
  }
  return WeightedMeasure(n, a, std::move(theta), std::move(w));
}

WeightedMeasure WeightedMeasure::composite(int n, double a, int panel_order, int halvings) {
  check_measure_args(n, a);
  if (halvings < 5) fail_validation("quadrature.bad_order", "halvings must be >= 5");
  const double alpha = 0.5 * (a - 1.0);
  const double beta = 0.5 * (n - 3.0);
  const GaussRule gl = gauss_legendre(panel_order);
  std::vector<double> theta, w;
  theta.reserve(static_cast<std::size_t>(panel_order) * (16 + halvings));
  w.reserve(theta.capacity());

  // Panel [0, 1/16]: u^beta handled by the rule.
  {
    const GaussRule gj = gauss_jacobi(panel_order, 0.0, beta);
    const double len = 1.0 / 16.0;
    const double scale = 0.5 * std::pow(0.5 * len, beta + 1.0);
    for (int k = 0; k < panel_order; ++k) {
      const double u = 0.5 * len * (1.0 + gj.nodes[k]);
      theta.push_back(theta_of(u, 1.0 - u));
      w.push_back(scale * gj.weights[k] * std::pow(1.0 - u, alpha));
    }
  }
  // Uniform panels on [1/16, 15/16] and halving panels in t = 1 - u down to
  // 2^{-halvings}. Everything is parametrised by t to keep 1 - u accurate.
  auto smooth_panel = [&](double t_lo, double t_hi) {
    const double half = 0.5 * (t_hi - t_lo);
    for (int k = 0; k < panel_order; ++k) {
      const double t = t_lo + half * (1.0 + gl.nodes[k]);
      const double u = 1.0 - t;
      theta.push_back(theta_of(u, t));
      w.push_back(0.5 * half * gl.weights[k] * std::pow(u, beta) * std::pow(t, alpha));
    }
  };
  for (int p = 1; p < 15; ++p) smooth_panel((15 - p) / 16.0, (16 - p) / 16.0);
  for (int k = 4; k < halvings; ++k) smooth_panel(std::ldexp(1.0, -(k + 1)), std::ldexp(1.0, -k));
  // Panel t in [0, 2^{-halvings}]: t^alpha handled by the rule.
  {
    const GaussRule gj = gauss_jacobi(panel_order, 0.0, alpha);
    const double len = std::ldexp(1.0, -halvings);
    const double scale = 0.5 * std::pow(0.5 * len, alpha + 1.0);
    for (int k = 0; k < panel_order; ++k) {
      const double t = 0.5 * len * (1.0 + gj.nodes[k]);
      const double u = 1.0 - t;
      theta.push_back(theta_of(u, t));
      w.push_back(scale * gj.weights[k] * std::pow(u, beta));
    }
  }
  return WeightedMeasure(n, a, std::move(theta), std::move(w));
}

double measure_mass(int n, double a) {
  check_measure_args(n, a);
  return 0.5 * std::exp(log_beta(0.5 * (n - 1.0), 0.5 * (a + 1.0)));
}

double weighted_integral(const AngularFunction& f, const WeightedMeasure& measure) {
  const auto th = measure.theta();
  const auto w = measure.weights();
  double s = 0.0;
  for (std::size_t k = 0; k < th.size(); ++k) {
    const double v = f(th[k]);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "integrand is not finite at node " << k << " (theta = " << th[k] << ")";
      fail_numerical("quadrature.non_finite_sample", msg.str());
    }
    s += w[k] * v;
  }
  return s;
}

double inner_product(const AngularFunction& f, const AngularFunction& g,
                     const WeightedMeasure& measure) {
  return weighted_integral([&](double t) { return f(t) * g(t); }, measure);
}

double norm(const AngularFunction& f, const WeightedMeasure& measure) {
  return std::sqrt(inner_product(f, f, measure));
}

double lemma1_gap(int n, double a) {
  if (!(a > -1.0 && a < 0.0)) fail_validation("quadrature.a_out_of_range", "a must lie in (-1, 0)");
  const double p = n + a - 2.0;
  const double sine_power = 0.5 * std::exp(log_beta(0.5 * (p + 1.0), 0.5));
  return sine_power - measure_mass(n, a);
}

}  // namespace jlflux
