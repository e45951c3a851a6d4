#pragma once

#include <vector>

namespace jlflux {

// Even power-series coefficients s_k of x*cot(x) = sum s_k x^{2k} and
// x*tan(x) = sum t_k x^{2k}, k = 0..count-1.
std::vector<double> x_cot_x_coefficients(int count);
std::vector<double> x_tan_x_coefficients(int count);

// y(x) = sum_m c_m x^{r + 2m}, a Frobenius solution of
//   x^2 y'' + (x P(x)) x y' = kappa x^2 y,   x P(x) = sum_k p_k x^{2k}.
struct FrobeniusSeries {
  double r = 0.0;
  std::vector<double> c;

  struct Value {
    double y;
    double dy;  // dy/dx
  };
  Value eval(double x) const;
};

// Builds the series with leading coefficient c0. Terms are added until they
// are negligible at x_max (relative 1e-18) or max_terms is reached.
FrobeniusSeries frobenius(const std::vector<double>& p, double kappa, double r, double c0,
                          double x_max, int max_terms = 400);

// Coefficients p_k for the two endpoint expansions of the angular operator
// d^2/dth^2 + ((n-2) cot th - a tan th) d/dth:
//   near th = 0 in x = th:          x P = (n-2) x cot x - a x tan x
//   near th = pi/2 in x = pi/2-th:  x P = a x cot x - (n-2) x tan x
std::vector<double> left_end_coefficients(int n, double a, int count);
std::vector<double> right_end_coefficients(int n, double a, int count);

}  // namespace jlflux
