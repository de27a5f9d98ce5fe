// One line per acceptance criterion; exit status is the number of failures.
#include <cstdio>

#include "tronquee/validation.hpp"

int main() {
  int failures = 0;
  for (const auto& c : tronquee::all_checks(20240607)) {
    if (c.criterion == 0) continue;
    const tronquee::CheckResult r = c.run();
    std::printf("criterion %2d %-4s %-38s %7.2fs  %s\n", r.criterion, r.pass ? "PASS" : "FAIL", r.key.c_str(),
                r.seconds, r.detail.c_str());
    std::fflush(stdout);
    failures += r.pass ? 0 : 1;
  }
  return failures;
}
