#pragma once

#include <string>
#include <vector>

namespace regionmap::acceptance {

struct Result {
  int id = 0;
  bool pass = false;
  std::string summary;
  std::string detail;
};

struct Options {
  /// The regionmap executable, for the end-to-end determinism check.
  std::string cli_path;
  int jobs = 1;
  /// Criteria to run (1-12); empty means all.
  std::vector<int> only;
};

/// Runs the acceptance criteria, printing one line per criterion as it
/// finishes when `print` is set.
std::vector<Result> run(const Options& options, bool print = true);

}  // namespace regionmap::acceptance
