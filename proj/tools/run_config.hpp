#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "jlflux/params.hpp"

namespace jlflux::cli {

// Everything a command reads. Every field has an explicit default, and the
// whole struct is written into each manifest.
struct RunConfig {
  ProblemParams params;

  int t_steps = 400;
  int theta_cells = 64;
  double horizon = 20.0;
  int angular_steps = 4096;

  double newton_tolerance = 1e-10;
  double classify_tolerance = 1e-9;
  double eigen_tolerance = 1e-12;

  int eigen_count = 5;
  std::string beta_kind = "linearized";  // linearized | profile | trace | value
  double beta = 0.0;                     // used when beta_kind is value

  std::string left = "data";        // data | origin
  std::string right = "dirichlet";  // dirichlet | asymptotic
  double left_factor = 0.99;
  bool stationary = false;  // left data = discrete V
  double origin_level = 0.1;
  int mode_count = 3;

  double fit_transient = 0.3;
  double fit_end = 1.0;
  double fit_residual_cap = 1.0;
  // The window starts once |z1| stays below onset * max |z1| and ends where
  // |z1| last exceeds floor * max |z1|, above the solver tolerance floor.
  double fit_onset = 1e-2;
  double fit_floor = 1e-8;

  double threshold_q_lo = 0.0;  // 0 means q_crit
  double threshold_q_hi = 0.0;  // 0 means 5 q_crit

  std::string out = "out";
  std::string format = "json";  // json | csv
  std::string suite = "all";
  std::string sweep_file;

  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& config);

// Overlays the keys present in j onto config. Unknown keys and wrong types
// throw Error(Validation, "cli.bad_config").
void merge_json(RunConfig& config, const nlohmann::json& j);

// Throws Error(Validation) for values outside their allowed sets.
void check_choices(const RunConfig& config);

// Rows "n,a,q"; a header line and blank lines are skipped.
std::vector<ProblemParams> read_sweep(const std::string& path);

}  // namespace jlflux::cli
