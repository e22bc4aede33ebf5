#pragma once

#include <string>
#include <vector>

namespace invscat {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Invariant suites: addition theorem, Wronskian constancy, Born consistency,
// zero reconstruction for q = 0, conjugation symmetry, reproducibility.
std::vector<SelftestCheck> run_selftest(int threads = 1);

}  // namespace invscat
