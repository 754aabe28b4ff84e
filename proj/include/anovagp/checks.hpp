#pragma once

#include <string>
#include <vector>

#include "anovagp/benchmarks.hpp"

namespace anovagp {

/// One threshold test on a benchmark report.
struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Modes within 0.03 of the analytical indices and Q^2 >= 0.95.
std::vector<Check> check_report(const Table1Report& report);
/// Group sums against the two-input Sobol oracle: 0.05 for the first-order
/// and interaction groups, 0.02 for S3 around 0.001.
std::vector<Check> check_report(const Table3Report& report);
/// S1 modes under the two copulas differ by more than the sum of the
/// 95% half-widths.
std::vector<Check> check_report(const CopulaReport& report);
/// Hd carries the largest mode, L and B stay below 0.02, Q and Ks are
/// positive and Q + Ks stays within 0.05 of its mean across repetitions.
std::vector<Check> check_report(const FloodReport& report);
/// Pooled coverage of S1 and S2 is at least the meta-model-only and the
/// predictive-mean coverage.
std::vector<Check> check_report(const CoverageReport& report);

bool all_passed(const std::vector<Check>& checks);

} // namespace anovagp
