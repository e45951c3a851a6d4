#include "doctest.h"

#include <cmath>
#include <limits>

#include "jlflux/checks.hpp"
#include "jlflux/error.hpp"

using namespace jlflux;

TEST_CASE("check catalog and suites") {
  const auto& all = check_catalog();
  REQUIRE(all.size() == 12);
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i].id == static_cast<int>(i) + 1);
  CHECK(suite_members("all").size() == 12);
  CHECK(suite_members("quadrature") == std::vector<int>{1, 2});
  CHECK(suite_members("cylinder") == std::vector<int>{9, 10, 11, 12});
  std::size_t total = 0;
  for (const char* s : {"quadrature", "spectrum", "classifier", "modal", "cylinder"}) total += suite_members(s).size();
  CHECK(total == 12);
  try {
    suite_members("nope");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "checks.unknown_suite");
  }
}

TEST_CASE("measurement relations") {
  using K = Measurement::Kind;
  CHECK(Measurement{"x", 1.0, 2.0, K::Below}.passed());
  CHECK(!Measurement{"x", 2.0, 2.0, K::Below}.passed());
  CHECK(Measurement{"x", 2.0, 2.0, K::AtMost}.passed());
  CHECK(Measurement{"x", 3.0, 2.0, K::Above}.passed());
  CHECK(!Measurement{"x", std::numeric_limits<double>::quiet_NaN(), 2.0, K::Below}.passed());
  CheckResult r;
  CHECK(!r.passed());  // no measurements
  r.items.push_back({"x", 1.0, 2.0});
  CHECK(r.passed());
  r.error = "boom";
  CHECK(!r.passed());
}

TEST_CASE("quadrature suite runs and formats one line per check") {
  for (int id : suite_members("quadrature")) {
    const auto r = run_check(id);
    CHECK(r.passed());
    const auto line = format_check(r);
    CHECK(line.rfind("PASS", 0) == 0);
    CHECK(line.find('\n') == std::string::npos);
  }
}
