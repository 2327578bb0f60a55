#pragma once

// Acceptance checks shared by `chiral verify` and the acceptance test binary.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chiral/params.hpp"

namespace chiral {

struct CheckResult {
  int criterion = 0;
  std::string title;
  bool passed = false;
  bool skipped = false;
  std::vector<std::string> details;  // measured vs expected, one entry per sub-check
};

struct AcceptanceConfig {
  Constants constants = Constants::paper_compat();
  bool quick = false;  // skip the Monte Carlo criteria (7, 8, 10)
  std::uint64_t seed = 20240917;
  unsigned threads = 0;
  std::optional<int> only;  // run a single criterion
};

inline constexpr int kCriterionCount = 10;

std::vector<CheckResult> run_acceptance(
    const AcceptanceConfig& config,
    const std::function<void(const CheckResult&)>& on_result = {});

// "[PASS] C3 ..." followed by indented detail lines.
std::string format_check(const CheckResult& result);

}  // namespace chiral
