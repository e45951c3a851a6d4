#include "doctest.h"

#include <cmath>
#include <random>

#include "jlflux/error.hpp"
#include "jlflux/modal.hpp"

using namespace jlflux;

namespace {

DerivedConstants constants_with(double sigma, double gamma) {
  DerivedConstants c{};
  c.sigma = sigma;
  c.gamma = gamma;
  return c;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

}  // namespace

TEST_CASE("nonlinearity g") {
  const double vb = 1.7, q = 3.5;
  CHECK(nonlinearity_g(0.0, vb, q) == 0.0);
  double worst = 0;
  for (int k = -32; k <= 32; ++k) {
    if (k == 0) continue;
    const double w = vb / 64 * k;
    CHECK(-nonlinearity_g(w, vb, q) > 0);
    worst = std::max(worst, std::abs(nonlinearity_g(w, vb, q)) / (w * w));
  }
  // Taylor: |g| <= q(q-1)/2 max (V_B - w)^{q-2} w^2
  CHECK(worst <= 0.5 * q * (q - 1) * std::pow(1.5 * vb, q - 2));
  CHECK_THROWS_AS(nonlinearity_g(2.0, vb, q), Error);
}

TEST_CASE("homogeneous closed forms") {
  const auto c = constants_with(1.3, 0.8);
  const auto zero = [](double) { return 0.0; };
  const double lambda = 2.0;
  const double rm = 0.5 * (-c.sigma - std::sqrt(c.sigma * c.sigma + 4 * (c.gamma + lambda)));
  const auto hi = duhamel_solution(2, lambda, 1.0, rm, zero, c, JLClass::Subcritical);
  for (std::size_t j = 0; j < hi.t.size(); ++j) CHECK(std::abs(hi.z[j] - std::exp(rm * hi.t[j])) < 1e-12);

  const double lc = -c.gamma - c.sigma * c.sigma / 4;
  const auto cr = duhamel_solution(1, lc, 0.0, 1.0, zero, c, JLClass::Critical);
  for (std::size_t j = 0; j < cr.t.size(); ++j)
    CHECK(std::abs(cr.z[j] - cr.t[j] * std::exp(-c.sigma * cr.t[j] / 2)) < 1e-12);
  const auto od = ode_direct(1, lc, 0.0, 1.0, zero, c);
  CHECK(max_diff(od.z, cr.z) < 1e-10);
}

TEST_CASE("higher mode with exponential forcing matches the bounded closed form") {
  const auto c = constants_with(0.9, 1.1);
  for (double lambda : {0.5, 4.0, 30.0})
    for (double mu : {0.3, 1.7}) {
      const double k = c.gamma + lambda;
      const double s = std::sqrt(c.sigma * c.sigma + 4 * k);
      const double rm = 0.5 * (-c.sigma - s);
      const double amp = 1.0 / (mu * mu - c.sigma * mu - k);
      const double z0 = 0.4;
      auto exact = [&](double t) { return amp * std::exp(-mu * t) + (z0 - amp) * std::exp(rm * t); };
      const auto f = [mu](double t) { return std::exp(-mu * t); };
      const auto tr = duhamel_solution(3, lambda, z0, 0.0, f, c, JLClass::Subcritical);
      double err = 0;
      for (std::size_t j = 0; j < tr.t.size(); ++j) err = std::max(err, std::abs(tr.z[j] - exact(tr.t[j])));
      CHECK(err < 1e-8);
      // short-horizon direct integration from the implied slope
      const double slope = -mu * amp + rm * (z0 - amp);
      const auto od = ode_direct(3, lambda, z0, slope, f, c, {2.0, 200});
      for (std::size_t j = 0; j < od.t.size(); ++j) CHECK(std::abs(od.z[j] - exact(od.t[j])) < 1e-7);
      // z e^{-rho^- t} stays bounded when the forcing decays
      double bound = 0;
      for (std::size_t j = 0; j < tr.t.size(); ++j) bound = std::max(bound, std::abs(tr.z[j]) * std::exp(-rm * tr.t[j]));
      CHECK(std::isfinite(bound));
    }
}

TEST_CASE("first mode Duhamel equals direct integration in every class") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (JLClass cls : {JLClass::Supercritical, JLClass::Critical, JLClass::Subcritical})
    for (int rep = 0; rep < 5; ++rep) {
      const auto c = constants_with(0.5 + 2.5 * U(rng), 0.2 + 2 * U(rng));
      double lambda = -c.gamma - c.sigma * c.sigma / 4;
      if (cls == JLClass::Supercritical) lambda += (0.05 + 0.9 * U(rng)) * c.sigma * c.sigma / 4;
      if (cls == JLClass::Subcritical) lambda -= 0.1 + 3 * U(rng);
      const double A = 2 * U(rng) - 1, mu = 0.2 + 2 * U(rng), om = 3 * U(rng);
      const auto f = [=](double t) { return A * std::exp(-mu * t) * std::cos(om * t); };
      const double z0 = 2 * U(rng) - 1, z1 = 2 * U(rng) - 1;
      const auto d = duhamel_solution(1, lambda, z0, z1, f, c, cls);
      const auto o = ode_direct(1, lambda, z0, z1, f, c);
      CHECK(max_diff(d.z, o.z) < 1e-7);
    }
}

TEST_CASE("superposition in the direct integrator") {
  const auto c = constants_with(1.0, 0.5);
  const auto f1 = [](double t) { return std::sin(t); };
  const auto f2 = [](double t) { return std::exp(-t); };
  const auto a = ode_direct(1, -1.0, 0.3, 0.0, f1, c, {10, 500});
  const auto b = ode_direct(1, -1.0, 0.0, 0.2, f2, c, {10, 500});
  const auto s = ode_direct(1, -1.0, 0.3, 0.2, [&](double t) { return f1(t) + f2(t); }, c, {10, 500});
  for (std::size_t j = 0; j < s.z.size(); ++j) CHECK(std::abs(s.z[j] - a.z[j] - b.z[j]) < 1e-9);
}

TEST_CASE("sampled forcing reproduces a callable one") {
  const auto c = constants_with(1.2, 0.4);
  const auto f = [](double t) { return std::exp(-0.7 * t) * (1 + 0.5 * std::sin(2 * t)); };
  std::vector<double> s;
  for (int j = 0; j <= 4000; ++j) s.push_back(f(j * 0.005));
  const auto g = sampled_forcing(0.0, 0.005, s);
  const auto a = duhamel_solution(1, -2.0, 0.1, 0.0, f, c, JLClass::Subcritical);
  const auto b = duhamel_solution(1, -2.0, 0.1, 0.0, g, c, JLClass::Subcritical);
  CHECK(max_diff(a.z, b.z) < 1e-9);
}

TEST_CASE("divergent tail is reported with its mode") {
  const auto c = constants_with(0.5, 0.5);
  try {
    duhamel_solution(4, 10.0, 0.0, 0.0, [](double t) { return std::exp(4.0 * t); }, c, JLClass::Subcritical);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "modal.divergent_tail");
    CHECK(std::string(e.what()).find("mode 4") != std::string::npos);
  }
}

TEST_CASE("vbar residual") {
  const auto c = constants_with(0.7, 1.5);
  std::vector<double> t, zero, vbar, vb;
  const double q = 3.0, VB = 1.3, Vbar = std::pow(VB, q) / c.gamma;
  for (int j = 0; j <= 100; ++j) {
    t.push_back(0.1 * j);
    zero.push_back(0.0);
    vbar.push_back(Vbar);
    vb.push_back(VB);
  }
  CHECK(vbar_residual(t, zero, zero, c, q) == 0.0);
  CHECK(vbar_residual(t, vbar, vb, c, q) < 1e-12);
  CHECK_THROWS_AS(vbar_residual(t, zero, std::vector<double>(3), c, q), Error);
}

TEST_CASE("decay fits on exact models") {
  std::vector<double> t, z1, z2, z3;
  const double rho = -0.37, sigma = 1.1, K = 0.8;
  for (int j = 0; j <= 3000; ++j) {
    const double x = 0.01 * j;
    t.push_back(x);
    z1.push_back(3 * std::exp(rho * x));
    z2.push_back((2 * x + 1) * std::exp(-sigma * x / 2));
    z3.push_back((0.4 * std::sin(K * x) - 1.2 * std::cos(K * x)) * std::exp(-sigma * x / 2));
  }
  const auto a = fit_pure_exponential(t, z1);
  CHECK(std::abs(a.rate - rho) < 1e-6);
  CHECK(std::abs(a.xi1 - 3) < 1e-6);
  const auto b = fit_linear_times_exponential(t, z2, sigma);
  CHECK(std::abs(b.xi1 - 2) < 1e-6);
  CHECK(std::abs(b.xi2 - 1) < 1e-6);
  const auto c = fit_oscillatory(t, z3, sigma, K);
  CHECK(std::abs(c.xi1 - 0.4) < 1e-6);
  CHECK(std::abs(c.xi2 + 1.2) < 1e-6);
  const auto d = fit_oscillatory_free(t, z3);
  CHECK(std::abs(d.frequency - K) < 1e-6);
  CHECK(std::abs(d.rate + sigma / 2) < 1e-6);
  CHECK(a.t_begin == doctest::Approx(9.0));
  CHECK_THROWS_AS(fit_pure_exponential(t, z3), Error);
  std::vector<double> grow(z1.size());
  for (std::size_t j = 0; j < t.size(); ++j) grow[j] = std::exp(0.1 * t[j]);
  CHECK_THROWS_AS(fit_pure_exponential(t, grow), Error);
}
