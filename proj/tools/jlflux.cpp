// Command-line front end: constants, profile, spectrum, classify, threshold,
// simulate and verify. Every command that writes files also writes
// manifest.json naming them, together with the full configuration.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "jlflux/angular_profile.hpp"
#include "jlflux/checks.hpp"
#include "jlflux/classifier.hpp"
#include "jlflux/cylinder.hpp"
#include "jlflux/error.hpp"
#include "jlflux/io.hpp"
#include "jlflux/modal.hpp"
#include "jlflux/params.hpp"
#include "jlflux/spectrum.hpp"
#include "run_config.hpp"

#ifndef JLFLUX_VERSION
#define JLFLUX_VERSION "unknown"
#endif

namespace {

using namespace jlflux;
using cli::RunConfig;
using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr int kValidationExit = 2;
constexpr int kNumericalExit = 3;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Files written by one command, in a single output directory.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  fs::path path(const std::string& name) const { return dir_ / name; }

  void write(const std::string& name, const std::string& kind, std::string_view content) {
    write_atomic(path(name), content);
    add(name, kind);
  }

  // For files written by a library routine.
  void add(const std::string& name, const std::string& kind) {
    std::lock_guard<std::mutex> lock(mutex_);
    entries_.push_back({name, kind});
  }

  json entries() const {
    auto sorted = entries_;
    std::sort(sorted.begin(), sorted.end());
    json out = json::array();
    for (const auto& [name, kind] : sorted) out.push_back({{"file", name}, {"kind", kind}});
    return out;
  }

  bool empty() const { return entries_.empty(); }

 private:
  fs::path dir_;
  std::mutex mutex_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Column table as CSV (17 significant digits) or as a JSON object of arrays.
std::string table(const std::string& format, const std::vector<std::string>& columns,
                  const std::vector<std::vector<double>>& data) {
  if (format == "csv") {
    std::ostringstream os;
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << '\n';
    const std::size_t rows = data.empty() ? 0 : data[0].size();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << format_double(data[c][r]);
      os << '\n';
    }
    return os.str();
  }
  json j = json::object();
  for (std::size_t c = 0; c < columns.size(); ++c) j[columns[c]] = data[c];
  return j.dump(1) + "\n";
}

std::string ext(const RunConfig& c) { return c.format == "csv" ? ".csv" : ".json"; }

json constants_json(const ProblemParams& p, const DerivedConstants& c) {
  return {{"n", p.n},          {"a", p.a},
          {"q", p.q},          {"m_q", c.m_q},
          {"gamma", c.gamma},  {"sigma", c.sigma},
          {"h_na", c.h_na},    {"q_crit", c.q_crit},
          {"q_sing", c.q_sing}, {"in_theorem_scope", c.in_theorem_scope}};
}

json report_json(const JLReport& r) {
  json j = {{"params", {{"n", r.params.n}, {"a", r.params.a}, {"q", r.params.q}}},
            {"constants", constants_json(r.params, r.constants)},
            {"C_a", r.C_a},
            {"V_B", r.V_B},
            {"beta", r.beta},
            {"J", r.J},
            {"jl_class", to_string(r.jl_class)},
            {"lambda1", r.lambda1},
            {"lambda2", r.lambda2},
            {"discriminant1", r.discriminant1},
            {"discriminant2", r.discriminant2},
            {"rho2", r.rho2},
            {"tolerance", r.tolerance}};
  auto opt = [&j](const char* key, const std::optional<double>& v) { j[key] = v ? json(*v) : json(nullptr); };
  opt("rho1", r.rho1);
  opt("rho1_plus", r.rho1_plus);
  opt("rho1_minus", r.rho1_minus);
  opt("K", r.K);
  return j;
}

json fit_json(const DecayFit& f) {
  return {{"model", to_string(f.model)}, {"rate", f.rate},         {"xi1", f.xi1},
          {"xi2", f.xi2},                {"frequency", f.frequency}, {"residual", f.residual},
          {"t_begin", f.t_begin},        {"t_end", f.t_end}};
}

ClassifyOptions classify_options(const RunConfig& c) {
  ClassifyOptions o;
  o.tolerance = c.classify_tolerance;
  o.grid.steps = c.angular_steps;
  return o;
}

// One (n, a, q) tuple of a command. prefix is empty for a single run.
struct Task {
  const RunConfig& config;
  ProblemParams params;
  std::string prefix;
  Outputs& out;
};

json run_profile(const Task& t) {
  validate(t.params);
  const auto c = derive(t.params);
  const AngularGrid grid{t.config.angular_steps};
  const auto V = singular_profile(t.params, c, grid);
  const auto th = V.theta();
  t.out.write(t.prefix + "profile" + ext(t.config), "profile",
              table(t.config.format, {"theta", "value", "derivative", "flux_variable"},
                    {{th.begin(), th.end()},
                     {V.values().begin(), V.values().end()},
                     {V.derivative().begin(), V.derivative().end()},
                     {V.flux_variable().begin(), V.flux_variable().end()}}));
  const auto mu = WeightedMeasure::composite(t.params.n, t.params.a);
  const double vbq = std::pow(V.boundary_value(), t.params.q);
  const double mean = weighted_integral([&](double x) { return V.value(x); }, mu);
  json s = {{"constants", constants_json(t.params, c)},
            {"V_B", V.boundary_value()},
            {"flux", V.flux()},
            {"integral_V", mean},
            {"flux_identity_residual", std::abs(vbq - c.gamma * mean) / vbq},
            {"equation_residual", V.equation_residual()},
            {"sign_changes", V.sign_changes()}};
  t.out.write(t.prefix + "summary.json", "summary", s.dump(1) + "\n");
  return s;
}

double spectrum_beta(const RunConfig& cfg, const ProblemParams& p, json& info) {
  if (cfg.beta_kind == "value") return cfg.beta;
  if (cfg.beta_kind == "trace") {
    const double ca = compute_Ca(p.n, p.a, AngularGrid{cfg.angular_steps});
    info["C_a"] = ca;
    return ca;
  }
  validate(p);
  const auto c = derive(p);
  const double vb = singular_profile(p, c, AngularGrid{cfg.angular_steps}).boundary_value();
  info["V_B"] = vb;
  const double b = std::pow(vb, p.q - 1);
  return cfg.beta_kind == "profile" ? b : p.q * b;
}

json run_spectrum(const Task& t) {
  json s = json::object();
  const double beta = spectrum_beta(t.config, t.params, s);
  SpectrumOptions so;
  so.grid.steps = t.config.angular_steps;
  so.tolerance = t.config.eigen_tolerance;
  const auto pairs = eigenpairs(beta, t.params.n, t.params.a, t.config.eigen_count, so);
  std::vector<double> index, lambda, eb, nr, zc;
  for (const auto& p : pairs) {
    index.push_back(p.index);
    lambda.push_back(p.lambda);
    eb.push_back(p.boundary_value);
    nr.push_back(p.norm_residual);
    zc.push_back(p.zero_count);
  }
  t.out.write(t.prefix + "eigenvalues" + ext(t.config), "eigenvalues",
              table(t.config.format, {"index", "lambda", "e_B", "norm_residual", "zero_count"},
                    {index, lambda, eb, nr, zc}));
  std::vector<std::string> cols = {"theta"};
  std::vector<std::vector<double>> data;
  const auto th = pairs.front().profile.theta();
  data.emplace_back(th.begin(), th.end());
  for (const auto& p : pairs) {
    cols.push_back("e" + std::to_string(p.index));
    data.emplace_back(p.profile.values().begin(), p.profile.values().end());
  }
  t.out.write(t.prefix + "eigenfunctions" + ext(t.config), "eigenfunctions", table(t.config.format, cols, data));
  s["n"] = t.params.n;
  s["a"] = t.params.a;
  s["q"] = t.params.q;
  s["beta_kind"] = t.config.beta_kind;
  s["beta"] = beta;
  s["lambda"] = lambda;
  t.out.write(t.prefix + "summary.json", "summary", s.dump(1) + "\n");
  return s;
}

json run_classify(const Task& t) {
  const auto r = jl_classify(t.params, classify_options(t.config));
  const json j = report_json(r);
  if (t.config.format == "csv") {
    std::ostringstream os;
    os << "n,a,q,jl_class,C_a,V_B,beta,J,lambda1,lambda2,discriminant1,rho1,K,rho2\n";
    os << r.params.n << ',' << format_double(r.params.a) << ',' << format_double(r.params.q) << ','
       << to_string(r.jl_class) << ',' << format_double(r.C_a) << ',' << format_double(r.V_B) << ','
       << format_double(r.beta) << ',' << format_double(r.J) << ',' << format_double(r.lambda1) << ','
       << format_double(r.lambda2) << ',' << format_double(r.discriminant1) << ','
       << (r.rho1 ? format_double(*r.rho1) : "") << ',' << (r.K ? format_double(*r.K) : "") << ','
       << format_double(r.rho2) << '\n';
    t.out.write(t.prefix + "report.csv", "report", os.str());
  } else {
    t.out.write(t.prefix + "report.json", "report", j.dump(1) + "\n");
  }
  return j;
}

json run_threshold(const Task& t) {
  const auto c = derive(t.params);
  const double lo = t.config.threshold_q_lo > 0 ? t.config.threshold_q_lo : c.q_crit;
  const double hi = t.config.threshold_q_hi > 0 ? t.config.threshold_q_hi : 5 * c.q_crit;
  const AngularGrid grid{t.config.angular_steps};
  const double q0 = jl_threshold(t.params.n, t.params.a, lo, hi, 1e-13, grid);
  const json j = {{"n", t.params.n}, {"a", t.params.a}, {"q_lo", lo}, {"q_hi", hi}, {"q_threshold", q0},
                  {"J_at_threshold", jl_functional({t.params.n, t.params.a, q0}, grid)}};
  t.out.write(t.prefix + "threshold.json", "threshold", j.dump(1) + "\n");
  return j;
}

CylinderOptions cylinder_options(const RunConfig& c, const ProblemParams& p) {
  CylinderOptions o;
  o.grid.t_steps = c.t_steps;
  o.grid.theta_cells = c.theta_cells;
  o.grid.horizon = c.horizon;
  o.left = c.left == "origin" ? LeftCondition::RegularOrigin : LeftCondition::Data;
  o.right = c.right == "asymptotic" ? RightCondition::Asymptotic : RightCondition::Dirichlet;
  o.left_factor = c.left_factor;
  o.origin_level = c.origin_level;
  o.tolerance = c.newton_tolerance;
  if (c.stationary) {
    const ThetaMesh m = make_theta_mesh(p.n, p.a, c.theta_cells);
    o.left_data = discrete_singular_profile(m, p.q, derive(p).gamma);
  }
  return o;
}

json run_simulate(const Task& t) {
  const auto& cfg = t.config;
  validate(t.params);
  const auto f = solve_nonlinear(t.params, cylinder_options(cfg, t.params));
  const int N = f.nodes(), L = f.levels();

  t.out.add(t.prefix + "field_long.csv", "field_long");
  write_field_csv(f, t.out.path(t.prefix + "field_long.csv"));

  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "t";
    for (int k = 0; k < N; ++k) os << ',' << format_double(f.mesh.theta[k]);
    os << '\n';
    for (int j = 0; j < L; ++j) {
      os << format_double(f.t[j]);
      for (int k = 0; k < N; ++k) os << ',' << format_double(f.at(j, k));
      os << '\n';
    }
    t.out.write(t.prefix + "field.csv", "field", os.str());
  } else {
    json v = json::array();
    for (int j = 0; j < L; ++j) v.push_back(f.slice(j));
    const json j = {{"t", f.t}, {"theta", f.mesh.theta}, {"v", v}, {"singular", f.singular}};
    t.out.write(t.prefix + "field.json", "field", j.dump() + "\n");
  }

  const double beta = t.params.q * std::pow(f.singular.back(), t.params.q - 1);
  const auto modes = discrete_modes(f.mesh, beta);
  const int count = std::min(cfg.mode_count, N);
  const auto z = project_modes(f, modes, count);
  std::vector<std::string> cols = {"t"};
  std::vector<std::vector<double>> data = {f.t};
  for (int i = 0; i < count; ++i) {
    cols.push_back("z" + std::to_string(i + 1));
    data.push_back(z[i].z);
  }
  t.out.write(t.prefix + "modes" + ext(cfg), "modes", table(cfg.format, cols, data));

  const auto E = energy_trace(f);
  t.out.write(t.prefix + "energy" + ext(cfg), "energy",
              table(cfg.format, {"t", "energy", "dissipation"}, {E.t, E.energy, E.dissipation}));
  t.out.write(t.prefix + "energy_residual" + ext(cfg), "energy_residual",
              table(cfg.format, {"t", "residual"}, {E.t_residual, E.residual}));

  double over = -1e300, stationary = 0, max_res = 0;
  for (int j = 0; j < L; ++j)
    for (int k = 0; k < N; ++k) {
      over = std::max(over, f.at(j, k) / f.singular[k]);
      stationary = std::max(stationary, std::abs(f.at(j, k) - f.singular[k]));
    }
  for (double r : E.residual) max_res = std::max(max_res, std::abs(r));
  const auto [emin, emax] = std::minmax_element(E.energy.begin(), E.energy.end());

  json s = {{"constants", constants_json(t.params, f.constants)},
            {"grid",
             {{"t_steps", cfg.t_steps},
              {"theta_cells", cfg.theta_cells},
              {"horizon", cfg.horizon},
              {"t_begin", f.options.grid.t_begin},
              {"step", f.step()}}},
            {"left", to_string(f.options.left)},
            {"right", to_string(f.options.right)},
            {"newton",
             {{"iterations", f.iterations}, {"residual", f.residual}, {"halvings", f.damping}}},
            {"mode1_ghost", f.mode1_ghost},
            {"V_B", f.singular.back()},
            {"max_v_over_V", over},
            {"max_abs_v_minus_V", stationary},
            {"lambda", std::vector<double>(modes.lambda.begin(), modes.lambda.begin() + count)},
            {"energy", {{"max_identity_residual", max_res}, {"spread", *emax - *emin}}}};

  FitWindow w;
  w.transient_fraction = cfg.fit_transient;
  w.end_fraction = cfg.fit_end;
  w.residual_cap = cfg.fit_residual_cap;
  {
    // start once z1 has settled below onset * max, stop before it reaches the solver floor
    const auto& z1 = z[0].z;
    double top = 0;
    for (double x : z1) top = std::max(top, std::abs(x));
    int settled = 0, last = 0;
    for (int j = 0; j < L; ++j) {
      if (std::abs(z1[j]) > cfg.fit_onset * top) settled = j + 1;
      if (std::abs(z1[j]) > cfg.fit_floor * top) last = j;
    }
    w.end_fraction = std::min(w.end_fraction, double(last) / (L - 1));
    w.transient_fraction = std::max(w.transient_fraction, double(settled) / (L - 1));
  }
  s["fit_window"] = {{"transient_fraction", w.transient_fraction},
                     {"end_fraction", w.end_fraction},
                     {"residual_cap", w.residual_cap},
                     {"onset", cfg.fit_onset},
                     {"floor", cfg.fit_floor}};
  if (t.params.q >= f.constants.q_crit) {
    const auto rep = jl_classify(t.params, classify_options(cfg));
    s["classification"] = report_json(rep);
    try {
      s["fit"] = fit_json(fit_decay(z[0].t, z[0].z, rep, w));
    } catch (const Error& e) {
      s["fit"] = {{"error", e.code()}, {"message", e.what()}};
    }
  } else {
    s["classification"] = nullptr;
    s["fit"] = {{"error", "cli.below_q_crit"}, {"message", "classification needs q >= q_crit"}};
  }
  t.out.write(t.prefix + "summary.json", "summary", s.dump(1) + "\n");
  return s;
}

std::string tuple_tag(const ProblemParams& p) {
  std::ostringstream os;
  os << "n" << p.n << "_a" << p.a << "_q" << p.q << "_";
  return os.str();
}

int exit_code(const Error& e) { return e.kind() == ErrorKind::Validation ? kValidationExit : kNumericalExit; }

json error_json(const Error& e) {
  return {{"status", "error"},
          {"kind", e.kind() == ErrorKind::Validation ? "validation" : "numerical"},
          {"code", e.code()},
          {"message", e.what()}};
}

void write_manifest(const RunConfig& cfg, const std::string& command, Outputs& out, const json& results,
                    double seconds, const std::string& started) {
  const json m = {{"tool", "jlflux"},
                  {"version", JLFLUX_VERSION},
                  {"command", command},
                  {"config", cli::to_json(cfg)},
                  {"outputs", out.entries()},
                  {"results", results},
                  {"timestamp", {{"started_utc", started}, {"wall_clock_seconds", seconds}}}};
  write_atomic(out.path("manifest.json"), m.dump(1) + "\n");
}

// Runs fn over the tuples, concurrently for sweeps, then writes the manifest.
int run_tuples(const RunConfig& cfg, const std::string& command,
               const std::function<json(const Task&)>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  const bool sweep = !cfg.sweep_file.empty();
  const auto tuples = sweep ? cli::read_sweep(cfg.sweep_file) : std::vector<ProblemParams>{cfg.params};
  Outputs out(cfg.out);

  std::vector<json> results(tuples.size());
  std::vector<int> codes(tuples.size(), 0);
  auto one = [&](std::size_t i) {
    const Task task{cfg, tuples[i], sweep ? tuple_tag(tuples[i]) : "", out};
    json r = {{"n", tuples[i].n}, {"a", tuples[i].a}, {"q", tuples[i].q}};
    try {
      r["result"] = fn(task);
      r["status"] = "ok";
    } catch (const Error& e) {
      r.update(error_json(e));
      codes[i] = exit_code(e);
    }
    results[i] = r;
  };
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t b = 0; b < tuples.size(); b += width) {
    std::vector<std::future<void>> wave;
    for (std::size_t i = b; i < std::min(tuples.size(), b + width); ++i)
      wave.push_back(std::async(std::launch::async, one, i));
    for (auto& f : wave) f.get();
  }

  int code = 0;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    if (codes[i]) {
      std::cerr << "error " << results[i]["message"].get<std::string>() << "\n";
      code = std::max(code, codes[i]);
    } else {
      std::cout << results[i]["result"].dump(1) << "\n";
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, command, out, json(results), secs, started);
  return code;
}

int run_constants(const RunConfig& cfg) {
  const auto tuples = cfg.sweep_file.empty() ? std::vector<ProblemParams>{cfg.params} : cli::read_sweep(cfg.sweep_file);
  json all = json::array();
  for (const auto& p : tuples) {
    validate(p);
    all.push_back(constants_json(p, derive(p)));
  }
  std::cout << (tuples.size() == 1 ? all[0] : all).dump(1) << "\n";
  return 0;
}

int run_verify(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  const auto ids = suite_members(cfg.suite);
  Outputs out(cfg.out);
  json results = json::array();
  bool all = true;
  std::vector<std::vector<double>> rows(4);
  for (int id : ids) {
    const auto r = run_check(id);
    std::cout << format_check(r) << "\n" << std::flush;
    all = all && r.passed();
    json items = json::array();
    for (const auto& m : r.items)
      items.push_back({{"label", m.label},
                       {"value", m.value},
                       {"bound", m.bound},
                       {"relation", m.kind == Measurement::Kind::Below   ? "<"
                                    : m.kind == Measurement::Kind::Above ? ">"
                                                                         : "<="},
                       {"passed", m.passed()}});
    results.push_back({{"id", r.id},
                       {"name", r.name},
                       {"passed", r.passed()},
                       {"items", items},
                       {"note", r.note},
                       {"error", r.error}});
    rows[0].push_back(r.id);
    rows[1].push_back(r.passed() ? 1 : 0);
    rows[2].push_back(static_cast<double>(r.items.size()));
    rows[3].push_back(r.seconds);
  }
  // timings stay out of the deterministic outputs except in csv form
  if (cfg.format == "csv")
    out.write("verify.csv", "verify", table("csv", {"id", "passed", "measurements", "seconds"}, rows));
  else
    out.write("verify.json", "verify", json({{"suite", cfg.suite}, {"checks", results}}).dump(1) + "\n");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, "verify", out, json({{"all_passed", all}}), secs, started);
  return all ? 0 : kNumericalExit;
}

// Values of the command-line flags; applied over the config file only when
// given.
struct Flags {
  int n = 0;
  double a = 0, q = 0, horizon = 0, tol = 0, beta = 0, left_factor = 0, origin_level = 0;
  double fit_transient = 0, fit_end = 0, fit_onset = 0, fit_floor = 0, q_lo = 0, q_hi = 0;
  int grid_t = 0, grid_theta = 0, angular_steps = 0, count = 0, modes = 0;
  bool stationary = false;
  std::string out, format, sweep_file, suite, left, right, beta_kind, config;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--n", f.n, "dimension, n >= 3");
  sub->add_option("--a", f.a, "weight exponent in (-1, 1), nonzero");
  sub->add_option("--q", f.q, "boundary exponent, q > 1");
  sub->add_option("--grid-t", f.grid_t, "t steps of the cylinder grid");
  sub->add_option("--grid-theta", f.grid_theta, "theta cells of the cylinder grid");
  sub->add_option("--horizon", f.horizon, "cylinder horizon T");
  sub->add_option("--tol", f.tol, "tolerance of the command's main solver");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--format", f.format, "json or csv");
  sub->add_option("--sweep-file", f.sweep_file, "CSV of n,a,q tuples");
  sub->add_option("--config", f.config, "JSON config file (or a previous manifest)");
  sub->add_option("--angular-steps", f.angular_steps, "uniform theta steps of the angular integrator");
}

void apply_flags(CLI::App* sub, const Flags& f, RunConfig& c) {
  auto given = [sub](const char* name) {
    const CLI::Option* o = sub->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  if (given("--n")) c.params.n = f.n;
  if (given("--a")) c.params.a = f.a;
  if (given("--q")) c.params.q = f.q;
  if (given("--grid-t")) c.t_steps = f.grid_t;
  if (given("--grid-theta")) c.theta_cells = f.grid_theta;
  if (given("--horizon")) c.horizon = f.horizon;
  if (given("--out")) c.out = f.out;
  if (given("--format")) c.format = f.format;
  if (given("--sweep-file")) c.sweep_file = f.sweep_file;
  if (given("--angular-steps")) c.angular_steps = f.angular_steps;
  if (given("--tol")) {
    const std::string name = sub->get_name();
    if (name == "simulate") c.newton_tolerance = f.tol;
    else if (name == "spectrum") c.eigen_tolerance = f.tol;
    else c.classify_tolerance = f.tol;
  }
  if (given("--count")) c.eigen_count = f.count;
  if (given("--beta-kind")) c.beta_kind = f.beta_kind;
  if (given("--beta")) {
    c.beta = f.beta;
    if (!given("--beta-kind")) c.beta_kind = "value";
  }
  if (given("--left")) c.left = f.left;
  if (given("--right")) c.right = f.right;
  if (given("--left-factor")) c.left_factor = f.left_factor;
  if (given("--stationary")) c.stationary = f.stationary;
  if (given("--origin-level")) c.origin_level = f.origin_level;
  if (given("--modes")) c.mode_count = f.modes;
  if (given("--fit-transient")) c.fit_transient = f.fit_transient;
  if (given("--fit-end")) c.fit_end = f.fit_end;
  if (given("--fit-onset")) c.fit_onset = f.fit_onset;
  if (given("--fit-floor")) c.fit_floor = f.fit_floor;
  if (given("--q-lo")) c.threshold_q_lo = f.q_lo;
  if (given("--q-hi")) c.threshold_q_hi = f.q_hi;
  if (given("--suite")) c.suite = f.suite;
}

RunConfig load_config(const std::string& path) {
  RunConfig c;
  if (path.empty()) return c;
  std::ifstream in(path);
  if (!in) fail_validation("cli.config_unreadable", "cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail_validation("cli.bad_config", "config file " + path + " is not valid JSON: " + e.what());
  }
  cli::merge_json(c, j.contains("config") && j.contains("outputs") ? j.at("config") : j);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singular solutions, weighted spectra, JL classification and cylinder simulations for "
               "-div(x_n^a grad u) = 0 with boundary flux u^q"};
  app.set_version_flag("--version", JLFLUX_VERSION);
  app.require_subcommand(1);
  Flags f;

  auto* constants = app.add_subcommand("constants", "print the derived constants as JSON");
  auto* profile = app.add_subcommand("profile", "singular angular profile V");
  auto* spectrum = app.add_subcommand("spectrum", "Robin eigenpairs");
  auto* classify = app.add_subcommand("classify", "JL classification of q");
  auto* threshold = app.add_subcommand("threshold", "bisection for the JL threshold in q");
  auto* simulate = app.add_subcommand("simulate", "nonlinear cylinder run with modal projections and fits");
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  for (auto* s : {constants, profile, spectrum, classify, threshold, simulate, verify}) add_flags(s, f);

  spectrum->add_option("--count", f.count, "number of eigenpairs");
  spectrum->add_option("--beta-kind", f.beta_kind, "linearized (q V_B^{q-1}), profile (V_B^{q-1}), trace (C_a) or value");
  spectrum->add_option("--beta", f.beta, "Robin coefficient when beta-kind is value");
  threshold->add_option("--q-lo", f.q_lo, "lower end of the bracket (default q_crit)");
  threshold->add_option("--q-hi", f.q_hi, "upper end of the bracket (default 5 q_crit)");
  simulate->add_option("--left", f.left, "data or origin");
  simulate->add_option("--right", f.right, "dirichlet or asymptotic");
  simulate->add_option("--left-factor", f.left_factor, "left data = factor * V");
  simulate->add_flag("--stationary", f.stationary, "left data = V");
  simulate->add_option("--origin-level", f.origin_level, "pinned mean at the left end, origin runs");
  simulate->add_option("--modes", f.modes, "number of projected modes");
  simulate->add_option("--fit-transient", f.fit_transient, "fraction of the horizon skipped before the fit");
  simulate->add_option("--fit-end", f.fit_end, "fraction where the fit window ends");
  simulate->add_option("--fit-onset", f.fit_onset, "start the fit once |z1| stays below onset * max |z1|");
  simulate->add_option("--fit-floor", f.fit_floor, "end the fit where |z1| last exceeds floor * max |z1|");
  verify->add_option("--suite", f.suite, "quadrature, spectrum, classifier, modal, cylinder or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidationExit;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    RunConfig cfg = load_config(f.config);
    apply_flags(sub, f, cfg);
    cli::check_choices(cfg);
    const std::string name = sub->get_name();
    if (name == "constants") return run_constants(cfg);
    if (name == "verify") return run_verify(cfg);
    if (name == "profile") return run_tuples(cfg, name, run_profile);
    if (name == "spectrum") return run_tuples(cfg, name, run_spectrum);
    if (name == "classify") return run_tuples(cfg, name, run_classify);
    if (name == "threshold") return run_tuples(cfg, name, run_threshold);
    return run_tuples(cfg, name, run_simulate);
  } catch (const Error& e) {
    std::cerr << "error " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error " << e.what() << "\n";
    return kNumericalExit;
  }
}
