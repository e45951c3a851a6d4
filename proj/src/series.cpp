#include "jlflux/series.hpp"

#include <boost/math/special_functions/zeta.hpp>

#include <cmath>
#include <numbers>

#include "jlflux/error.hpp"

namespace jlflux {

namespace {

// zeta(2k) / pi^{2k}
double scaled_even_zeta(int k) {
  return boost::math::zeta(2.0 * k) * std::pow(std::numbers::pi, -2.0 * k);
}

}  // namespace

std::vector<double> x_cot_x_coefficients(int count) {
  std::vector<double> s(count);
  for (int k = 0; k < count; ++k) s[k] = (k == 0) ? 1.0 : -2.0 * scaled_even_zeta(k);
  return s;
}

std::vector<double> x_tan_x_coefficients(int count) {
  std::vector<double> t(count);
  for (int k = 0; k < count; ++k)
    t[k] = (k == 0) ? 0.0
                    : 2.0 * boost::math::zeta(2.0 * k) *
                          (std::pow(2.0 / std::numbers::pi, 2.0 * k) -
                           std::pow(std::numbers::pi, -2.0 * k));
  return t;
}

std::vector<double> left_end_coefficients(int n, double a, int count) {
  const auto cot = x_cot_x_coefficients(count);
  const auto tan = x_tan_x_coefficients(count);
  std::vector<double> p(count);
  for (int k = 0; k < count; ++k) p[k] = (n - 2.0) * cot[k] - a * tan[k];
  return p;
}

std::vector<double> right_end_coefficients(int n, double a, int count) {
  const auto cot = x_cot_x_coefficients(count);
  const auto tan = x_tan_x_coefficients(count);
  std::vector<double> p(count);
  for (int k = 0; k < count; ++k) p[k] = a * cot[k] - (n - 2.0) * tan[k];
  return p;
}

FrobeniusSeries frobenius(const std::vector<double>& p, double kappa, double r, double c0,
                          double x_max, int max_terms) {
  if (static_cast<int>(p.size()) < max_terms)
    fail_validation("series.too_few_coefficients", "need one operator coefficient per term");
  FrobeniusSeries s;
  s.r = r;
  s.c.push_back(c0);
  const double x2 = x_max * x_max;
  double biggest = std::abs(c0);
  double power = 1.0;
  int quiet = 0;
  for (int m = 1; m < max_terms; ++m) {
    double rhs = kappa * s.c[m - 1];
    for (int k = 1; k <= m && k < static_cast<int>(p.size()); ++k)
      rhs -= p[k] * s.c[m - k] * (r + 2.0 * (m - k));
    const double denom = (r + 2.0 * m) * (r + 2.0 * m - 1.0 + p[0]);
    s.c.push_back(rhs / denom);
    power *= x2;
    const double term = std::abs(s.c[m]) * power;
    biggest = std::max(biggest, term);
    if (term <= 1e-18 * biggest) {
      if (++quiet == 3) return s;
    } else {
      quiet = 0;
    }
  }
  fail_numerical("series.no_convergence", "Frobenius series did not converge within the term limit");
}

FrobeniusSeries::Value FrobeniusSeries::eval(double x) const {
  // Horner in x^2 for sum c_m x^{2m} and its x-derivative.
  const double x2 = x * x;
  double s = 0.0, ds = 0.0;
  for (std::size_t m = c.size(); m-- > 0;) {
    s = s * x2 + c[m];
    if (m > 0) ds = ds * x2 + 2.0 * m * c[m];
  }
  // ds currently holds sum 2m c_m x^{2m-2}; restore the x factor.
  ds *= x;
  if (r == 0.0) return {s, ds};
  const double xr = std::pow(x, r);
  return {xr * s, xr * ds + r * std::pow(x, r - 1.0) * s};
}

}  // namespace jlflux
