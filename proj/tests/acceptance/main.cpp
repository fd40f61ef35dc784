#include <cstdio>
#include <cstdlib>
#include <string>

#include "regionmap/acceptance.hpp"

int main() {
  regionmap::acceptance::Options opt;
  opt.cli_path = REGIONMAP_CLI;
  if (const char* j = std::getenv("REGIONMAP_JOBS")) opt.jobs = std::max(1, std::atoi(j));
  const auto results = regionmap::acceptance::run(opt, true);
  int failed = 0;
  for (const auto& r : results) failed += !r.pass;
  std::printf("%zu criteria, %d failed\n", results.size(), failed);
  return 0;
}
