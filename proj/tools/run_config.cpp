#include "run_config.hpp"

#include <fstream>
#include <sstream>

#include "jlflux/error.hpp"

namespace jlflux::cli {

using nlohmann::json;

json to_json(const RunConfig& c) {
  return json{
      {"params", {{"n", c.params.n}, {"a", c.params.a}, {"q", c.params.q}}},
      {"grid",
       {{"t_steps", c.t_steps},
        {"theta_cells", c.theta_cells},
        {"horizon", c.horizon},
        {"angular_steps", c.angular_steps}}},
      {"tolerances",
       {{"newton", c.newton_tolerance}, {"classify", c.classify_tolerance}, {"eigen", c.eigen_tolerance}}},
      {"spectrum", {{"count", c.eigen_count}, {"beta_kind", c.beta_kind}, {"beta", c.beta}}},
      {"simulate",
       {{"left", c.left},
        {"right", c.right},
        {"left_factor", c.left_factor},
        {"stationary", c.stationary},
        {"origin_level", c.origin_level},
        {"modes", c.mode_count}}},
      {"fit_window",
       {{"transient_fraction", c.fit_transient},
        {"end_fraction", c.fit_end},
        {"residual_cap", c.fit_residual_cap},
        {"onset", c.fit_onset},
        {"floor", c.fit_floor}}},
      {"threshold", {{"q_lo", c.threshold_q_lo}, {"q_hi", c.threshold_q_hi}}},
      {"output", {{"directory", c.out}, {"format", c.format}}},
      {"verify", {{"suite", c.suite}}},
      {"sweep_file", c.sweep_file},
  };
}

namespace {

[[noreturn]] void bad(const std::string& what) { fail_validation("cli.bad_config", what); }

template <class T>
void take(const json& obj, const char* section, const char* key, T& dst) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("config key ") + section + "." + key + " has the wrong type");
  }
}

void only(const json& obj, const char* section, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) bad(std::string("config section ") + section + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) bad(std::string("unknown config key ") + section + "." + k);
  }
}

}  // namespace

void merge_json(RunConfig& c, const json& j) {
  if (!j.is_object()) bad("config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (k == "params") {
      only(v, "params", {"n", "a", "q"});
      take(v, "params", "n", c.params.n);
      take(v, "params", "a", c.params.a);
      take(v, "params", "q", c.params.q);
    } else if (k == "grid") {
      only(v, "grid", {"t_steps", "theta_cells", "horizon", "angular_steps"});
      take(v, "grid", "t_steps", c.t_steps);
      take(v, "grid", "theta_cells", c.theta_cells);
      take(v, "grid", "horizon", c.horizon);
      take(v, "grid", "angular_steps", c.angular_steps);
    } else if (k == "tolerances") {
      only(v, "tolerances", {"newton", "classify", "eigen"});
      take(v, "tolerances", "newton", c.newton_tolerance);
      take(v, "tolerances", "classify", c.classify_tolerance);
      take(v, "tolerances", "eigen", c.eigen_tolerance);
    } else if (k == "spectrum") {
      only(v, "spectrum", {"count", "beta_kind", "beta"});
      take(v, "spectrum", "count", c.eigen_count);
      take(v, "spectrum", "beta_kind", c.beta_kind);
      take(v, "spectrum", "beta", c.beta);
    } else if (k == "simulate") {
      only(v, "simulate", {"left", "right", "left_factor", "stationary", "origin_level", "modes"});
      take(v, "simulate", "left", c.left);
      take(v, "simulate", "right", c.right);
      take(v, "simulate", "left_factor", c.left_factor);
      take(v, "simulate", "stationary", c.stationary);
      take(v, "simulate", "origin_level", c.origin_level);
      take(v, "simulate", "modes", c.mode_count);
    } else if (k == "fit_window") {
      only(v, "fit_window", {"transient_fraction", "end_fraction", "residual_cap", "onset", "floor"});
      take(v, "fit_window", "transient_fraction", c.fit_transient);
      take(v, "fit_window", "end_fraction", c.fit_end);
      take(v, "fit_window", "residual_cap", c.fit_residual_cap);
      take(v, "fit_window", "onset", c.fit_onset);
      take(v, "fit_window", "floor", c.fit_floor);
    } else if (k == "threshold") {
      only(v, "threshold", {"q_lo", "q_hi"});
      take(v, "threshold", "q_lo", c.threshold_q_lo);
      take(v, "threshold", "q_hi", c.threshold_q_hi);
    } else if (k == "output") {
      only(v, "output", {"directory", "format"});
      take(v, "output", "directory", c.out);
      take(v, "output", "format", c.format);
    } else if (k == "verify") {
      only(v, "verify", {"suite"});
      take(v, "verify", "suite", c.suite);
    } else if (k == "sweep_file") {
      take(j, "", "sweep_file", c.sweep_file);
    } else {
      bad("unknown config section " + k);
    }
  }
}

void check_choices(const RunConfig& c) {
  auto one_of = [](const std::string& v, std::initializer_list<const char*> set, const char* what) {
    for (const char* s : set)
      if (v == s) return;
    std::string msg = std::string(what) + " must be one of";
    for (const char* s : set) msg += std::string(" ") + s;
    fail_validation("cli.bad_choice", msg + " (got '" + v + "')");
  };
  one_of(c.format, {"json", "csv"}, "format");
  one_of(c.left, {"data", "origin"}, "left");
  one_of(c.right, {"dirichlet", "asymptotic"}, "right");
  one_of(c.beta_kind, {"linearized", "profile", "trace", "value"}, "beta_kind");
  if (c.t_steps < 2 || c.theta_cells < 2 || c.angular_steps < 16)
    fail_validation("cli.bad_grid", "grid sizes must be at least 2 (t, theta) and 16 (angular)");
  if (!(c.horizon > 0)) fail_validation("cli.bad_grid", "horizon must be positive");
  if (c.eigen_count < 1 || c.mode_count < 1)
    fail_validation("cli.bad_count", "eigen and mode counts must be at least 1");
  if (!(c.fit_transient >= 0 && c.fit_transient < c.fit_end && c.fit_end <= 1 && c.fit_floor >= 0 &&
        c.fit_onset > c.fit_floor))
    fail_validation("cli.bad_fit_window", "fit window needs 0 <= transient < end <= 1 and 0 <= floor < onset");
  if (!(c.newton_tolerance > 0 && c.classify_tolerance > 0 && c.eigen_tolerance > 0))
    fail_validation("cli.bad_tolerance", "tolerances must be positive");
}

std::vector<ProblemParams> read_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_validation("cli.sweep_unreadable", "cannot open sweep file " + path);
  std::vector<ProblemParams> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream is(line);
    ProblemParams p;
    if (!(is >> p.n >> p.a >> p.q)) {
      if (rows.empty() && lineno == 1) continue;  // header
      fail_validation("cli.bad_sweep", "sweep file " + path + " line " + std::to_string(lineno) +
                                           " is not n,a,q");
    }
    rows.push_back(p);
  }
  if (rows.empty()) fail_validation("cli.bad_sweep", "sweep file " + path + " has no tuples");
  return rows;
}

}  // namespace jlflux::cli
