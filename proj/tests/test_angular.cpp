#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "jlflux/angular_profile.hpp"
#include "jlflux/error.hpp"
#include "jlflux/quadrature.hpp"

using namespace jlflux;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

// In u = sin^2(theta) the regular solution is 2F1(A, B; c; u) with
// c = (n-1)/2, A + B = (n+a-2)/2, A*B = kappa/4. Gauss summation gives the
// value at u = 1 and the coefficient of the (1-u)^{(1-a)/2} branch gives
// the flux. Valid while the roots A, B are real (kappa <= (n+a-2)^2/4).
struct Hypergeometric {
  double A, B, c, s;
  Hypergeometric(int n, double a, double kappa) {
    const double d = n + a - 2.0;
    const double disc = std::sqrt(d * d / 4 - kappa);
    A = d / 4 - disc / 2;
    B = d / 4 + disc / 2;
    c = 0.5 * (n - 1);
    s = 0.5 * (1 - a);
  }
  double boundary_value() const {
    return std::tgamma(c) * std::tgamma(s) / (std::tgamma(c - A) * std::tgamma(c - B));
  }
  double flux() const {
    return 2 * std::tgamma(c) * std::tgamma(1 - s) / (std::tgamma(A) * std::tgamma(B));
  }
  double value(double theta) const {
    const double u = std::sin(theta) * std::sin(theta);
    double sum = 1.0, term = 1.0;
    for (int k = 0; k < 5000 && std::abs(term) > 1e-18 * std::abs(sum); ++k) {
      term *= (A + k) * (B + k) / ((c + k) * (k + 1.0)) * u;
      sum += term;
    }
    return sum;
  }
};

double rel(double x, double y) { return std::abs(x - y) / std::max(std::abs(y), 1e-300); }

}  // namespace

TEST_CASE("kappa = 0 gives the constant profile") {
  const auto p = integrate_angular(0.0, 4, -0.3);
  for (double v : p.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.flux() == 0.0);
  CHECK(p.derivative()[0] == 0.0);
}

TEST_CASE("boundary value and flux match the hypergeometric closed form") {
  for (int n : {3, 5, 8})
    for (double a : {-0.7, -0.2, 0.4}) {
      const double d = n + a - 2.0;
      for (double kappa : {-30.0, -2.0, 0.5, d * d / 4}) {
        if (kappa > d * d / 4) continue;
        CAPTURE(n);
        CAPTURE(a);
        CAPTURE(kappa);
        const Hypergeometric ref(n, a, kappa);
        const auto p = integrate_angular(kappa, n, a);
        CHECK(rel(p.boundary_value(), ref.boundary_value()) < 1e-9);
        CHECK(rel(p.flux(), ref.flux()) < 1e-9);
        for (double th : {0.1, 0.37, 0.8, 1.05})
          CHECK(std::abs(p.value(th) - ref.value(th)) < 1e-10 * std::max(1.0, std::abs(ref.value(th))));
      }
    }
}

TEST_CASE("dense evaluation agrees with samples and is continuous at window edges") {
  const auto p = integrate_angular(-55.0, 6, -0.45);
  const auto th = p.theta();
  for (std::size_t k = 0; k < th.size(); k += 97) CHECK(p.value(th[k]) == doctest::Approx(p.values()[k]).epsilon(1e-12));
  for (double x = 0.001; x < kHalfPi; x += 0.0173) {
    const double e = 1e-9;
    CHECK(std::abs(p.value(x + e) - p.value(x)) < 1e-6);
  }
  CHECK(p.value(kHalfPi) == p.boundary_value());
}

TEST_CASE("scaling is linear") {
  const auto p = integrate_angular(3.7, 5, -0.5);
  const auto q = p.scaled(2.0);
  CHECK(q.boundary_value() == 2.0 * p.boundary_value());
  CHECK(q.flux() == 2.0 * p.flux());
  for (std::size_t k = 0; k < p.values().size(); k += 11) CHECK(q.values()[k] == 2.0 * p.values()[k]);
  CHECK(q.value(0.3) == doctest::Approx(2.0 * p.value(0.3)).epsilon(1e-15));
}

TEST_CASE("discrete equation residual is second order") {
  for (double a : {-0.6, 0.5}) {
    const double r1 = integrate_angular(2.5, 4, a, {1024}).equation_residual();
    const double r2 = integrate_angular(2.5, 4, a, {2048}).equation_residual();
    CHECK(r1 / r2 >= 3.5);
  }
}

TEST_CASE("singular profile satisfies the flux identity and is increasing") {
  for (int n : {3, 4, 7})
    for (double a : {-0.8, -0.3})
      for (double q : {2.0, 5.0, 12.0}) {
        const ProblemParams prm{n, a, q};
        const auto c = derive(prm);
        if (c.gamma <= 0) continue;
        CAPTURE(n);
        CAPTURE(a);
        CAPTURE(q);
        const auto V = singular_profile(prm, c);
        const double vb = V.boundary_value();
        const double vbq = std::pow(vb, q);
        const double integral =
            weighted_integral([&](double t) { return V.value(t); }, WeightedMeasure::composite(n, a));
        CHECK(rel(V.flux(), vbq) < 1e-12);
        CHECK(rel(c.gamma * integral, vbq) < 1e-8);
        CHECK(std::pow(vb, q - 1) <= c.gamma * measure_mass(n, a));
        for (std::size_t k = 1; k + 1 < V.values().size(); ++k) CHECK(V.derivative()[k] > 0.0);
      }
}

TEST_CASE("singular profile needs gamma > 0") {
  const ProblemParams prm{3, -0.5, 4.0};  // q = (n-1)/(n+a-2)
  try {
    singular_profile(prm, derive(prm));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "angular.q_below_singular_threshold");
  }
}

TEST_CASE("overflow reports the reach point") {
  try {
    integrate_angular(1e7, 3, -0.5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Numerical);
    CHECK(e.code() == "angular.overflow");
    CHECK(std::string(e.what()).find("theta =") != std::string::npos);
  }
}

TEST_CASE("profile csv") {
  std::ostringstream out;
  write_profile_csv(out, integrate_angular(1.0, 3, -0.5, {32}));
  const std::string s = out.str();
  CHECK(s.rfind("theta,value,derivative,flux_variable\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 34);
}
