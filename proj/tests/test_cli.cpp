#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "jlflux/error.hpp"
#include "run_config.hpp"

using namespace jlflux;
using namespace jlflux::cli;

namespace {

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST_CASE("run config round-trips through json") {
  RunConfig c;
  c.params = {7, -0.3, 4.25};
  c.t_steps = 123;
  c.horizon = 0.1 + 0.2;  // not exactly representable in short decimal
  c.newton_tolerance = 3e-11;
  c.beta_kind = "value";
  c.beta = -1.0 / 3.0;
  c.stationary = true;
  c.fit_end = 0.9;
  c.format = "csv";
  c.sweep_file = "tuples.csv";
  RunConfig back;
  merge_json(back, nlohmann::json::parse(to_json(c).dump()));
  CHECK(back == c);
  CHECK(to_json(back).dump() == to_json(c).dump());
}

TEST_CASE("partial config keeps the defaults") {
  RunConfig c;
  merge_json(c, nlohmann::json::parse(R"({"params": {"q": 9.5}, "grid": {"theta_cells": 32}})"));
  RunConfig d;
  d.params.q = 9.5;
  d.theta_cells = 32;
  CHECK(c == d);
}

TEST_CASE("config errors") {
  RunConfig c;
  CHECK(code_of([&] { merge_json(c, nlohmann::json::parse(R"({"grid": {"cells": 3}})")); }) == "cli.bad_config");
  CHECK(code_of([&] { merge_json(c, nlohmann::json::parse(R"({"params": {"n": "five"}})")); }) == "cli.bad_config");
  CHECK(code_of([&] { merge_json(c, nlohmann::json::parse(R"({"extra": 1})")); }) == "cli.bad_config");
  RunConfig bad;
  bad.format = "xml";
  CHECK(code_of([&] { check_choices(bad); }) == "cli.bad_choice");
  bad = RunConfig{};
  bad.t_steps = 1;
  CHECK(code_of([&] { check_choices(bad); }) == "cli.bad_grid");
  CHECK(code_of([&] { check_choices(RunConfig{}); }).empty());
}

TEST_CASE("sweep file") {
  const char* path = "test_cli_sweep.csv";
  {
    std::ofstream out(path);
    out << "n,a,q\n4,-0.5,3\n\n12, -0.5, 6\n";
  }
  const auto rows = read_sweep(path);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].n == 12);
  CHECK(rows[1].q == 6.0);
  {
    std::ofstream out(path);
    out << "4,-0.5,3\nfour,1,2\n";
  }
  CHECK(code_of([&] { read_sweep(path); }) == "cli.bad_sweep");
  std::remove(path);
  CHECK(code_of([&] { read_sweep("no_such_sweep.csv"); }) == "cli.sweep_unreadable");
}
