// Runs the twelve invariants and prints one pass/fail line per invariant.
// Optional arguments restrict the run to the given ids.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "jlflux/checks.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty())
    for (const auto& c : jlflux::check_catalog()) ids.push_back(c.id);
  int failed = 0;
  for (int id : ids) {
    const auto r = jlflux::run_check(id);
    std::printf("%s\n", jlflux::format_check(r).c_str());
    if (!r.note.empty()) std::printf("       %s\n", r.note.c_str());
    std::fflush(stdout);
    if (!r.passed()) ++failed;
  }
  std::printf("%d of %zu invariants passed\n", static_cast<int>(ids.size()) - failed, ids.size());
  return failed == 0 ? 0 : 1;
}
