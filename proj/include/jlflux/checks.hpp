#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace jlflux {

// One quantitative comparison inside a check.
struct Measurement {
  enum class Kind { Below, Above, AtMost };  // value < bound, value > bound, value <= bound
  std::string label;
  double value = 0.0;
  double bound = 0.0;
  Kind kind = Kind::Below;

  bool passed() const;
};

struct CheckResult {
  int id = 0;
  std::string name;
  std::vector<Measurement> items;
  std::string note;   // instance description
  std::string error;  // set when the check threw
  double seconds = 0.0;

  bool passed() const;
};

struct CheckInfo {
  int id;
  const char* name;
  const char* suite;
};

// The twelve invariants, in order.
const std::vector<CheckInfo>& check_catalog();

// Runs one invariant. Library errors are caught and reported as a failure.
CheckResult run_check(int id);

// Ids in a suite: quadrature, spectrum, classifier, modal, cylinder or all.
// Throws Error(Validation, "checks.unknown_suite").
std::vector<int> suite_members(std::string_view suite);

// "PASS  4 name: label value < bound; ... (1.23 s)"
std::string format_check(const CheckResult& result);

}  // namespace jlflux
