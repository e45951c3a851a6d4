#include "doctest.h"

#include "jlflux/error.hpp"
#include "jlflux/params.hpp"

using namespace jlflux;

TEST_CASE("constants at the critical exponent") {
  const auto c = derive({3, -0.5, 7.0});
  CHECK(c.m_q == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(c.sigma == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(c.gamma == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(c.h_na == doctest::Approx(-0.0625).epsilon(1e-15));
  CHECK(c.q_crit == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(c.q_sing == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(c.in_theorem_scope);
}

TEST_CASE("constants for n=5, a=-0.2, q=3") {
  // (1.2)/2 = 0.6; 2.8 - 1.2 = 1.6; 0.6 * 2.2 = 1.32
  const auto c = derive({5, -0.2, 3.0});
  CHECK(c.m_q == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(c.sigma == doctest::Approx(1.6).epsilon(1e-14));
  CHECK(c.gamma == doctest::Approx(1.32).epsilon(1e-14));
}

TEST_CASE("sigma^2 + 4 gamma = (n+a-2)^2") {
  for (int n = 3; n <= 12; ++n)
    for (double a : {-0.9, -0.3, 0.4})
      for (double q : {1.1, 2.0, 5.5, 40.0}) {
        const auto c = derive({n, a, q});
        const double d = n + a - 2.0;
        CHECK(std::abs(c.sigma * c.sigma + 4 * c.gamma - d * d) <= 1e-12 * d * d);
        CHECK(c.in_theorem_scope == (a < 0));
        CHECK((c.gamma > 0) == (c.m_q < d));
      }
}

TEST_CASE("derive is deterministic") {
  const auto x = derive({7, -0.37, 3.3});
  const auto y = derive({7, -0.37, 3.3});
  CHECK(x.gamma == y.gamma);
  CHECK(x.sigma == y.sigma);
}

TEST_CASE("parameter validation codes") {
  auto code_of = [](ProblemParams p) {
    try {
      derive(p);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Validation);
      return e.code();
    }
    return std::string();
  };
  CHECK(code_of({2, -0.5, 3}) == "params.n_too_small");
  CHECK(code_of({3, -0.5, 1.0}) == "params.q_not_above_one");
  CHECK(code_of({3, -1.0, 3}) == "params.a_out_of_range");
  CHECK(code_of({3, 1.0, 3}) == "params.a_out_of_range");
  CHECK(code_of({3, 0.0, 3}) == "params.a_is_zero");
}
