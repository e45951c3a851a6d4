#include "doctest.h"

#include <cmath>

#include "jlflux/classifier.hpp"
#include "jlflux/error.hpp"
#include "jlflux/quadrature.hpp"
#include "jlflux/spectrum.hpp"

using namespace jlflux;

namespace {

// flux / y_B of the regular solution with real hypergeometric roots A, B:
// 2 Gamma(1-s) Gamma(c-A) Gamma(c-B) / (Gamma(s) Gamma(A) Gamma(B)).
double ratio_closed_form(int n, double a, double kappa) {
  const double d = n + a - 2.0, c = 0.5 * (n - 1), s = 0.5 * (1 - a);
  const double disc = std::sqrt(d * d / 4 - kappa);
  const double A = d / 4 - disc / 2, B = d / 4 + disc / 2;
  return 2 * std::tgamma(1 - s) * std::tgamma(c - A) * std::tgamma(c - B) /
         (std::tgamma(s) * std::tgamma(A) * std::tgamma(B));
}

// J(q) = C_a - q V_B^{q-1} with V_B^{q-1} = flux/y_B at kappa = gamma.
double j_closed_form(int n, double a, double q) {
  const double d = n + a - 2.0;
  const auto c = derive({n, a, q});
  return ratio_closed_form(n, a, d * d / 4) - q * ratio_closed_form(n, a, c.gamma);
}

}  // namespace

TEST_CASE("J matches its closed form") {
  for (int n : {3, 6, 12})
    for (double a : {-0.7, -0.2})
      for (double f : {1.0, 1.7, 4.0}) {
        const double q = derive({n, a, 2.0}).q_crit * f;
        const double ref = j_closed_form(n, a, q);
        CHECK(std::abs(jl_functional({n, a, q}) - ref) < 1e-9 * std::max(1.0, std::abs(ref)));
      }
}

TEST_CASE("low dimension example is subcritical") {
  const auto r = jl_classify({3, -0.5, 7.0});
  CHECK(r.jl_class == JLClass::Subcritical);
  CHECK(r.K.has_value());
  CHECK(!r.rho1.has_value());
  CHECK(r.rho2 > 0);
}

TEST_CASE("discriminant identity") {
  for (int n : {3, 8})
    for (double f : {1.2, 3.0}) {
      const auto r = jl_classify({n, -0.4, f * derive({n, -0.4, 2.0}).q_crit});
      const double d = n - 0.4 - 2;
      CHECK(std::abs(r.discriminant1 - (d * d + 4 * r.lambda1)) <= 1e-12 * d * d);
    }
}

TEST_CASE("q_crit is subcritical for n = 3..8") {
  for (int n = 3; n <= 8; ++n)
    for (double a : {-0.8, -0.4, -0.1}) {
      const double qc = derive({n, a, 2.0}).q_crit;
      const auto c = derive({n, a, qc});
      CHECK(qc * c.gamma - c.h_na > 0);
      const auto r = jl_classify({n, a, qc});
      CHECK(r.jl_class == JLClass::Subcritical);
      CHECK(std::abs(r.constants.sigma) < 1e-12);
    }
}

TEST_CASE("n = 3..6 stays subcritical on [q_crit, 5 q_crit]") {
  for (int n = 3; n <= 6; ++n)
    for (double a : {-0.8, -0.4, -0.1}) {
      const double qc = derive({n, a, 2.0}).q_crit;
      for (double f : {1.0, 1.5, 2.5, 3.5, 5.0}) {
        const auto r = jl_classify({n, a, qc * f});
        CHECK(r.jl_class == JLClass::Subcritical);
        CHECK((r.discriminant1 < 0) == (r.J < 0));
      }
    }
}

TEST_CASE("large dimension example is supercritical and meets the integral bound") {
  const ProblemParams prm{30, -0.5, 20.0};
  const auto r = jl_classify(prm);
  CHECK(r.jl_class == JLClass::Supercritical);
  CHECK(r.constants.gamma * prm.q * measure_mass(prm.n, prm.a) < r.C_a);
  REQUIRE(r.rho1.has_value());
  CHECK(*r.rho1 == doctest::Approx(0.5 * (r.constants.sigma - std::sqrt(r.discriminant1))));
  CHECK(*r.rho1_plus == doctest::Approx(-*r.rho1));
  CHECK(*r.rho1 > 0);
}

TEST_CASE("critical exponent from bisection") {
  const int n = 12;
  const double a = -0.5;
  const double q0 = jl_threshold(n, a, 2.6, 4.0);
  const auto r = jl_classify({n, a, q0});
  CHECK(r.jl_class == JLClass::Critical);
  CHECK(std::abs(r.discriminant1) < 1e-6);
  REQUIRE(r.rho1.has_value());
  CHECK(*r.rho1 == doctest::Approx(r.constants.sigma / 2));
  CHECK(r.constants.m_q + *r.rho1 == doctest::Approx((n + a - 2) / 2));
  CHECK(std::abs(j_closed_form(n, a, q0)) < 1e-8);
}

TEST_CASE("G analysis") {
  for (double a : {-0.9, -0.5, -0.1}) {
    const auto g3 = g_analysis(3, a);
    CHECK(g3.inf_value == doctest::Approx((1 - a * a) / 2).epsilon(1e-14));
    CHECK(g3.inf_location == doctest::Approx((1 + a) / 2));
    const auto g4 = g_analysis(4, a);
    CHECK(g4.inf_value == doctest::Approx((2 + a) * (1 - a) / 2).epsilon(1e-14));
  }
  const auto g5 = g_analysis(5, -0.2);
  CHECK(g5.inf_location == 0.0);
  CHECK(g5.inf_value == doctest::Approx(2.8 * 2.0 / 4).epsilon(1e-14));
  const auto g6 = g_analysis(6, -0.3);
  CHECK(g6.inf_value == doctest::Approx((4 - 0.3) * 1.5 / 4).epsilon(1e-14));
  for (int n = 7; n <= 12; ++n)
    for (double a : {-0.9, -0.5, -0.1})
      if (g_function(n, a, 0.0) < 0) CHECK(g_analysis(n, a).inf_value < 0);
  CHECK_THROWS_AS(g_analysis(5, 0.3), Error);
}

TEST_CASE("modal roots") {
  const auto c = derive({5, -0.2, 3.0});
  const auto pos = modal_roots(2.0, c);
  CHECK(pos.real);
  CHECK(pos.rho_minus < 0);
  CHECK(pos.rho_plus > 0);
  const double lam0 = -c.sigma * c.sigma / 4 - c.gamma;
  const auto dbl = modal_roots(lam0, c);
  CHECK(dbl.rho_minus == doctest::Approx(-c.sigma / 2));
  CHECK(dbl.rho_plus == doctest::Approx(-c.sigma / 2));
  const auto kernel = modal_roots(-c.gamma, c);
  CHECK(kernel.rho_plus == doctest::Approx(0.0));
  CHECK(kernel.rho_minus == doctest::Approx(-c.sigma));
  const auto cx = modal_roots(lam0 - 1.0, c);
  CHECK(!cx.real);
  CHECK(cx.imag_part == doctest::Approx(1.0));
}

TEST_CASE("classification needs q >= q_crit") {
  try {
    jl_classify({3, -0.5, 5.0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "classifier.q_below_critical");
  }
}
