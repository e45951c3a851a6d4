#include "doctest.h"

#include <cmath>
#include <sstream>

#include "jlflux/angular_profile.hpp"
#include "jlflux/error.hpp"
#include "jlflux/spectrum.hpp"

using namespace jlflux;

namespace {

double rel(double x, double y) { return std::abs(x - y) / std::abs(y); }

// Trace constant from the hypergeometric form of the kappa = d^2/4 profile
// (double root A = B = d/4, c = (n-1)/2, s = (1-a)/2).
double ca_closed_form(int n, double a) {
  const double d = n + a - 2.0, c = 0.5 * (n - 1), s = 0.5 * (1 - a);
  const double ga = std::tgamma(c - d / 4) / std::tgamma(d / 4);
  return 2 * std::tgamma(1 - s) / std::tgamma(s) * ga * ga;
}

}  // namespace

TEST_CASE("flux mismatch roots") {
  const auto m0 = flux_mismatch(0.0, 0.0, 3, -0.5);
  CHECK(std::abs(m0.mismatch) < 1e-14);
  CHECK(m0.zero_count == 0);

  const ProblemParams prm{5, -0.3, 3.0};
  const auto c = derive(prm);
  const auto V = singular_profile(prm, c);
  const double vb1 = std::pow(V.boundary_value(), prm.q - 1);
  const auto m1 = flux_mismatch(-c.gamma, vb1, prm.n, prm.a);
  CHECK(std::abs(m1.mismatch) < 1e-12);

  const double ca = compute_Ca(prm.n, prm.a);
  const auto m2 = flux_mismatch(c.h_na, ca, prm.n, prm.a);
  CHECK(std::abs(m2.mismatch) < 1e-12);
}

TEST_CASE("trace constant matches the closed form and the lower bound") {
  for (int n = 3; n <= 10; ++n)
    for (double a : {-0.9, -0.5, -0.1, 0.5}) {
      const double ca = compute_Ca(n, a);
      CHECK(rel(ca, ca_closed_form(n, a)) < 1e-9);
      if (n >= 4 && a < 0) CHECK(ca > (n + a - 3) / 2);
    }
}

TEST_CASE("Neumann spectrum is the Jacobi polynomial spectrum") {
  // beta = 0: lambda_{j+1} = 2j(2j + n + a - 2)
  for (double a : {-0.5, 0.3}) {
    const int n = 4;
    const double d = n + a - 2;
    const auto pairs = eigenpairs(0.0, n, a, 12);
    for (int j = 0; j < 12; ++j) {
      const double exact = 2.0 * j * (2.0 * j + d);
      CHECK(std::abs(pairs[j].lambda - exact) < 1e-8 * std::max(1.0, exact));
    }
  }
}

TEST_CASE("eigenpairs at the trace constant and at the singular profile") {
  for (int n : {3, 6})
    for (double a : {-0.7, -0.2}) {
      const double d = n + a - 2;
      const double ca = compute_Ca(n, a);
      const auto hardy = eigenpairs(ca, n, a, 1);
      CHECK(rel(hardy[0].lambda, -d * d / 4) < 1e-8);
      // C_a e_B = (d^2/4) int e dmu
      SpectrumSolver solver(n, a);
      const auto& e = hardy[0].profile;
      const double mean = weighted_integral([&](double t) { return e.value(t); }, solver.measure());
      CHECK(rel(ca * e.boundary_value(), d * d / 4 * mean) < 1e-8);

      const ProblemParams prm{n, a, 2.0 * (n - 1) / d};
      const auto c = derive(prm);
      const auto V = singular_profile(prm, c);
      const double vb1 = std::pow(V.boundary_value(), prm.q - 1);
      const auto first = solver.eigenpairs(vb1, 1);
      CHECK(rel(first[0].lambda, -c.gamma) < 1e-8);
      const double vn = norm([&](double t) { return V.value(t); }, solver.measure());
      const double dist = norm([&](double t) { return first[0].profile.value(t) - V.value(t) / vn; },
                               solver.measure());
      CHECK(dist < 1e-6);
      CHECK(std::abs(rayleigh_quotient(V, vb1, solver.measure()) + c.gamma) < 1e-6);
    }
}

TEST_CASE("linearized spectrum signs") {
  for (int n : {3, 5, 9})
    for (double a : {-0.8, -0.3})
      for (double q : {2.0, 6.0, 20.0}) {
        const ProblemParams prm{n, a, q};
        const auto c = derive(prm);
        if (c.gamma <= 0) continue;
        const auto V = singular_profile(prm, c);
        const double beta = q * std::pow(V.boundary_value(), q - 1);
        const auto pairs = eigenpairs(beta, n, a, 2);
        CHECK(pairs[0].lambda < -c.gamma);
        CHECK(pairs[1].lambda > 0);
        const double ca = compute_Ca(n, a);
        const double d = n + a - 2;
        CHECK((pairs[0].lambda + d * d / 4 > 0) == (ca - beta > 0));
      }
}

TEST_CASE("orthonormality, zero counts and positive traces") {
  SpectrumSolver solver(3, -0.5);
  const auto pairs = solver.eigenpairs(1.3, 8);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(pairs[i].boundary_value > 0);
    CHECK(pairs[i].zero_count == static_cast<int>(i));
    CHECK(pairs[i].norm_residual < 1e-8);
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      const double ip = inner_product([&](double t) { return pairs[i].profile.value(t); },
                                      [&](double t) { return pairs[j].profile.value(t); },
                                      solver.measure());
      CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-7);
    }
    CHECK(std::abs(rayleigh_quotient(pairs[i].profile, 1.3, solver.measure()) - pairs[i].lambda) <
          1e-6 * std::max(1.0, std::abs(pairs[i].lambda)));
  }
}

TEST_CASE("quadratic growth and monotonicity in beta") {
  const auto pairs = eigenpairs(2.0, 4, -0.4, 20);
  double lo = 1e300, hi = 0;
  for (int i = 4; i <= 20; ++i) {
    const double r = pairs[i - 1].lambda / (i * i);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(lo > 0);
  CHECK(hi / lo < 3);
  SpectrumSolver solver(4, -0.4);
  double prev = 1e300;
  for (double beta = -1.0; beta <= 4.0; beta += 0.5) {
    const double l1 = solver.eigenpairs(beta, 1)[0].lambda;
    CHECK(l1 < prev);
    prev = l1;
  }
}

TEST_CASE("Rayleigh quotient is minimized by the first eigenfunction") {
  SpectrumSolver solver(5, -0.4);
  const auto pairs = solver.eigenpairs(0.9, 2);
  for (double eps : {0.3, 0.05, -0.2}) {
    // perturb along the second eigenfunction: quotient is a convex combination
    const double l = (pairs[0].lambda + eps * eps * pairs[1].lambda) / (1 + eps * eps);
    CHECK(l >= pairs[0].lambda - 1e-8);
  }
  auto trial = pairs[0].profile.scaled(1.0);
  CHECK(rayleigh_quotient(trial, 0.9, solver.measure()) >= pairs[0].lambda - 1e-8);
}

TEST_CASE("ceiling error reports the number found") {
  SpectrumOptions opt;
  opt.lambda_ceiling = 50;
  try {
    eigenpairs(0.0, 3, -0.5, 10, opt);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "spectrum.ceiling_reached");
    CHECK(std::string(e.what()).find("only 4 of 10") != std::string::npos);
  }
}

TEST_CASE("eigen csv") {
  std::ostringstream out;
  write_eigen_csv(out, eigenpairs(0.0, 3, -0.5, 2));
  CHECK(out.str().rfind("index,lambda,e_B,norm_residual,zero_count\n1,", 0) == 0);
}
