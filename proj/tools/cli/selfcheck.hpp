#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mata::cli {

struct CheckResult {
  std::string name;
  double achieved = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct SelfcheckOptions {
  bool full = false;
};

std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& options, std::ostream& progress);

}  // namespace mata::cli
