#include "doctest.h"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "jlflux/error.hpp"
#include "jlflux/quadrature.hpp"

using namespace jlflux;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

// Reference integral of f(theta) sin^{n-2} cos^a over (0, pi/2) by
// double-exponential quadrature, using the endpoint distance for cos.
template <class F>
double reference(F f, int n, double a) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto g = [&](double x, double xc) {
    const double phi = (xc > 0) ? xc : kHalfPi - x;
    return f(x) * std::pow(std::sin(x), n - 2) * std::pow(std::sin(phi), a);
  };
  return ts.integrate(g, 0.0, kHalfPi, 1e-15);
}

double rel(double x, double y) { return std::abs(x - y) / std::abs(y); }

}  // namespace

TEST_CASE("mass matches the Beta closed form and an adaptive reference") {
  for (int n = 3; n <= 10; ++n)
    for (double a : {-0.9, -0.5, -0.1}) {
      const double beta = 0.5 * std::beta(0.5 * (n - 1), 0.5 * (a + 1));
      const double ref = reference([](double) { return 1.0; }, n, a);
      CHECK(rel(ref, beta) < 1e-10);
      CHECK(rel(measure_mass(n, a), beta) < 1e-13);
      CHECK(rel(WeightedMeasure::jacobi(n, a).total_mass(), beta) < 1e-12);
      CHECK(rel(WeightedMeasure::composite(n, a).total_mass(), beta) < 1e-12);
    }
}

TEST_CASE("elementary masses") {
  CHECK(WeightedMeasure::jacobi(3, -0.5).total_mass() == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(WeightedMeasure::jacobi(3, 0.0).total_mass() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("weights are positive") {
  for (auto m : {WeightedMeasure::jacobi(4, -0.7), WeightedMeasure::composite(9, 0.6)})
    for (double w : m.weights()) CHECK(w > 0.0);
}

TEST_CASE("sin^2 is absorbed into the weight") {
  for (int n : {3, 6})
    for (double a : {-0.8, 0.3}) {
      const auto m = WeightedMeasure::jacobi(n, a);
      const double s = weighted_integral([](double t) { return std::sin(t) * std::sin(t); }, m);
      CHECK(rel(s, measure_mass(n + 2, a)) < 1e-13);
    }
}

TEST_CASE("polynomials in u are integrated exactly") {
  const auto m = WeightedMeasure::jacobi(5, -0.3, 8);
  auto f = [](double t) {
    const double u = std::sin(t) * std::sin(t);
    return 1 - 3 * u + 7 * std::pow(u, 5) - 2 * std::pow(u, 15);
  };
  CHECK(rel(weighted_integral(f, m), reference(f, 5, -0.3)) < 1e-13);
}

// Smooth here means smooth in u = sin^2(theta), the rule's variable.
TEST_CASE("doubling the order changes smooth integrals below 1e-12") {
  auto f = [](double t) { return std::cos(6 * t) * std::exp(std::sin(t) * std::sin(t)); };
  for (int n : {3, 7})
    for (double a : {-0.5, 0.5}) {
      const double s64 = weighted_integral(f, WeightedMeasure::jacobi(n, a, 64));
      const double s128 = weighted_integral(f, WeightedMeasure::jacobi(n, a, 128));
      CHECK(std::abs(s64 - s128) <= 1e-12 * std::abs(s128));
      CHECK(rel(s64, reference(f, n, a)) < 1e-11);
    }
}

TEST_CASE("composite rule resolves the boundary branch") {
  for (double a : {-0.9, -0.4, 0.4}) {
    auto f = [a](double t) {
      return std::pow(std::cos(t), 1 - a) * std::cos(4 * t) + std::sin(t) * std::sin(t);
    };
    const double ref = reference(f, 4, a);
    CHECK(rel(weighted_integral(f, WeightedMeasure::composite(4, a)), ref) < 1e-12);
  }
}

TEST_CASE("inner product and norm") {
  const auto m = WeightedMeasure::jacobi(6, -0.2);
  auto one = [](double) { return 1.0; };
  CHECK(rel(inner_product(one, one, m), measure_mass(6, -0.2)) < 1e-13);
  CHECK(norm([](double) { return 0.0; }, m) == 0.0);
  CHECK(norm([](double t) { return t; }, m) > 0.0);
}

TEST_CASE("non-finite samples are reported with their node") {
  const auto m = WeightedMeasure::jacobi(3, -0.5, 10);
  const double bad = m.theta()[4];
  try {
    weighted_integral([bad](double t) { return t == bad ? std::nan("") : 1.0; }, m);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "quadrature.non_finite_sample");
    CHECK(std::string(e.what()).find("node 4") != std::string::npos);
  }
}

TEST_CASE("lemma1_gap is negative and matches a direct integral") {
  for (int n = 3; n <= 10; ++n)
    for (double a : {-0.9, -0.5, -0.1}) {
      const double gap = lemma1_gap(n, a);
      CHECK(gap < 0.0);
      boost::math::quadrature::tanh_sinh<double> ts;
      const double direct = ts.integrate(
          [&](double x, double xc) {
            const double phi = (xc > 0) ? xc : kHalfPi - x;
            const double s = std::sin(x);
            return std::pow(s, n + a - 2) - std::pow(s, n - 2) * std::pow(std::sin(phi), a);
          },
          0.0, kHalfPi, 1e-15);
      CHECK(std::abs(gap - direct) < 1e-10 * std::abs(measure_mass(n, a)));
    }
  CHECK(std::abs(lemma1_gap(3, -1e-9)) < 1e-8);
  CHECK_THROWS_AS(lemma1_gap(3, 0.2), Error);
}
