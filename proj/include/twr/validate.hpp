// Self-validation battery: nine numbered checks covering the analytic tiers
// against their oracles, the Monte Carlo ground truth, the optimizer's
// stationarity, the interference-profile identities, and a fault-injection
// sanity check.  `twr validate` and the acceptance test binary share this
// implementation.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace twr {

enum class ValidateLevel { fast, full };

struct CriterionResult {
  std::string id;     // "C1" .. "C9"
  std::string label;  // short machine-friendly name
  bool pass = false;
  bool skipped = false;  // e.g. the spawn check inside a mutated child run
  std::string detail;    // worst observed margins, one line
};

// Runs every criterion, streaming one "[Cn] PASS/FAIL label (detail)" line
// per criterion to `log`.  `twr_binary` is the CLI executable to spawn for
// the fault-injection check; pass default_twr_binary() normally.
std::vector<CriterionResult> run_validation(ValidateLevel level, std::ostream& log,
                                            const std::string& twr_binary);

bool all_passed(const std::vector<CriterionResult>& results);

// TWR_BIN if set, otherwise the `twr` executable next to the current
// binary; empty string when neither resolves to an executable.
std::string default_twr_binary();

}  // namespace twr
