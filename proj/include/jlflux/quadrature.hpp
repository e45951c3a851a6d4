#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace jlflux {

// Gauss rule on [-1, 1] for the weight (1-x)^alpha (1+x)^beta.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix built from
// the three-term recurrence, weights are mu_0 times the squared first
// eigenvector components. Requires alpha, beta > -1 and order >= 1.
GaussRule gauss_jacobi(int order, double alpha, double beta);
inline GaussRule gauss_legendre(int order) { return gauss_jacobi(order, 0.0, 0.0); }

// Node/weight table for d(mu) = sin^{n-2}(theta) cos^a(theta) d(theta) on
// (0, pi/2). Built in the variable u = sin^2(theta), where the measure
// becomes (1/2) u^{(n-3)/2} (1-u)^{(a-1)/2} du.
class WeightedMeasure {
 public:
  // A single Gauss-Jacobi rule of the given order. Exact (to round-off) for
  // integrands that are polynomials in u of degree < 2*order.
  static WeightedMeasure jacobi(int n, double a, int order = 64);

  // Composite rule: uniform panels in u on [0, 15/16], then panels halving
  // towards u = 1, the last one a Gauss-Jacobi panel carrying the
  // (1-u)^{(a-1)/2} factor. Meant for angular profiles, which contain a
  // (pi/2 - theta)^{1-a} branch that a single polynomial rule resolves
  // only algebraically.
  static WeightedMeasure composite(int n, double a, int panel_order = 16, int halvings = 36);

  int n() const noexcept { return n_; }
  double a() const noexcept { return a_; }
  std::size_t size() const noexcept { return theta_.size(); }
  std::span<const double> theta() const noexcept { return theta_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double total_mass() const noexcept;

 private:
  WeightedMeasure(int n, double a, std::vector<double> theta, std::vector<double> weights);

  int n_;
  double a_;
  std::vector<double> theta_;
  std::vector<double> weights_;
};

// I_{n,a} = (1/2) B((n-1)/2, (a+1)/2), the total mass of d(mu).
double measure_mass(int n, double a);

using AngularFunction = std::function<double(double)>;

// Throws Error(Numerical, "quadrature.non_finite_sample") naming the node
// where f is not finite.
double weighted_integral(const AngularFunction& f, const WeightedMeasure& measure);
double inner_product(const AngularFunction& f, const AngularFunction& g,
                     const WeightedMeasure& measure);
double norm(const AngularFunction& f, const WeightedMeasure& measure);

// int_0^{pi/2} sin^{n+a-2} - I_{n,a}; negative for a in (-1, 0).
// Requires n >= 3 and a in (-1, 0).
double lemma1_gap(int n, double a);

}  // namespace jlflux
