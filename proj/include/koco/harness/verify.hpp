#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace koco::harness {

enum class VerifyLevel { fast, full };

VerifyLevel verify_level_from_string(const std::string& s);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// "check=<name> status=pass|fail seconds=<s> detail=<...>"
std::string format_check(const CheckResult& r);

inline constexpr int kCriterionCount = 9;

/// Acceptance criterion 1..9 at the sizes of the given level.
CheckResult run_criterion(int id, VerifyLevel level);

/// Criteria plus the supporting property checks; each line is printed as soon
/// as it completes.
std::vector<CheckResult> verify_suite(VerifyLevel level, std::ostream& out);

}  // namespace koco::harness
