// Acceptance run: one PASS/FAIL line per criterion, followed by its individual checks.
// Exit status is nonzero when any criterion fails.

#include <cstdlib>
#include <iostream>
#include <set>
#include <string>

#include "geophase/acceptance.hpp"

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const auto results = geophase::acceptance::run({}, only);
  int failed = 0;
  for (const auto& r : results) {
    geophase::acceptance::print(std::cout, r);
    failed += r.passed() ? 0 : 1;
  }
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
