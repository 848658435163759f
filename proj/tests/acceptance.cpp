// Acceptance gate: runs the full-scale self-validation battery and exits
// nonzero if any criterion fails.  One PASS/FAIL line per criterion.
#include <iostream>

#include "twr/validate.hpp"

int main() {
  const auto results =
      twr::run_validation(twr::ValidateLevel::full, std::cout, twr::default_twr_binary());
  return twr::all_passed(results) ? 0 : 1;
}
