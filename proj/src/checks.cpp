#include "anovagp/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "anovagp/errors.hpp"

namespace anovagp {

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << std::fixed << v;
  return out.str();
}

Check within(const std::string& name, double value, double target, double tol) {
  return {name, std::abs(value - target) <= tol,
          fmt(value) + " vs " + fmt(target) + " (tol " + fmt(tol) + ")"};
}

const IndexRow& row_of(const std::vector<IndexRow>& rows, const Subset& u) {
  for (const auto& r : rows) {
    if (r.u == u) {
      return r;
    }
  }
  throw ConfigError("report has no row for " + u.label());
}

const CoverageRow& row_of(const std::vector<CoverageRow>& rows, const Subset& u) {
  for (const auto& r : rows) {
    if (r.u == u) {
      return r;
    }
  }
  throw ConfigError("report has no row for " + u.label());
}

} // namespace

std::vector<Check> check_report(const Table1Report& report) {
  std::vector<Check> out;
  for (const auto& r : report.rows) {
    if (r.has_reference) {
      out.push_back(within("mode " + r.u.label(), r.pooled.mode, r.reference, 0.03));
    }
  }
  out.push_back({"Q2", report.q2 >= 0.95, fmt(report.q2) + " >= 0.95"});
  return out;
}

std::vector<Check> check_report(const Table3Report& report) {
  return {within("S1+S2+S12", report.group_first, report.sobol_first, 0.05),
          within("S3", report.group_third, 0.001, 0.02),
          within("S13+S23", report.group_interaction, report.sobol_interaction, 0.05)};
}

std::vector<Check> check_report(const CopulaReport& report) {
  const Subset s1 = Subset::from_indices(std::vector<int>{0});
  const auto& g = row_of(report.gaussian_rows, s1).pooled;
  const auto& c = row_of(report.clayton_rows, s1).pooled;
  const double gap = std::abs(g.mode - c.mode);
  const double half = 0.5 * (g.q975 - g.q025) + 0.5 * (c.q975 - c.q025);
  return {{"S1 Gaussian vs Clayton", gap > half, "mode gap " + fmt(gap) + (gap > half ? " > " : " <= ") + "half-widths " + fmt(half)}};
}

std::vector<Check> check_report(const FloodReport& report) {
  std::vector<Check> out;
  std::vector<double> q_ks;
  for (std::size_t r = 0; r < report.repetitions.size(); ++r) {
    const auto& rows = report.repetitions[r].rows;
    const std::string tag = report.repetitions.size() > 1 ? " (rep " + std::to_string(r + 1) + ")" : "";
    auto mode = [&](int i) { return rows[static_cast<std::size_t>(i)].pooled.mode; };
    int best = 0;
    for (int i = 1; i < static_cast<int>(rows.size()); ++i) {
      if (mode(i) > mode(best)) {
        best = i;
      }
    }
    out.push_back({"Hd largest" + tag, best == 4, "largest is " + report.names[static_cast<std::size_t>(best)]});
    out.push_back({"L below 0.02" + tag, mode(6) < 0.02, fmt(mode(6))});
    out.push_back({"B below 0.02" + tag, mode(7) < 0.02, fmt(mode(7))});
    out.push_back({"Q positive" + tag, mode(0) > 0.0, fmt(mode(0))});
    out.push_back({"Ks positive" + tag, mode(1) > 0.0, fmt(mode(1))});
    q_ks.push_back(mode(0) + mode(1));
  }
  if (q_ks.size() > 1) {
    const double mean = std::accumulate(q_ks.begin(), q_ks.end(), 0.0) / static_cast<double>(q_ks.size());
    double spread = 0.0;
    for (double v : q_ks) {
      spread = std::max(spread, std::abs(v - mean));
    }
    out.push_back({"Q+Ks stable", spread <= 0.05, "max deviation " + fmt(spread) + " around " + fmt(mean)});
  }
  return out;
}

std::vector<Check> check_report(const CoverageReport& report) {
  std::vector<Check> out;
  for (int i : {0, 1}) {
    const auto& r = row_of(report.rows, Subset::from_indices(std::vector<int>{i}));
    const std::string label = r.u.label();
    out.push_back({"pooled >= meta-model " + label, r.covered_pooled >= r.covered_realization,
                   std::to_string(r.covered_pooled) + " vs " + std::to_string(r.covered_realization)});
    out.push_back({"pooled >= predictive mean " + label, r.covered_pooled >= r.covered_mean,
                   std::to_string(r.covered_pooled) + " vs " + std::to_string(r.covered_mean)});
  }
  return out;
}

bool all_passed(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

} // namespace anovagp
