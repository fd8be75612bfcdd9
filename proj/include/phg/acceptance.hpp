#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace phg {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 10;

// Runs one acceptance criterion (1..10). Random draws use `seed`.
CriterionResult runCriterion(int id, std::uint64_t seed = 0);
// All criteria, or those listed in `only`.
std::vector<CriterionResult> runAcceptance(std::uint64_t seed = 0, const std::vector<int>& only = {});

// "PASS  4  c11 law  (detail, 1.23 s)".
std::string formatCriterion(const CriterionResult& r);

}  // namespace phg
