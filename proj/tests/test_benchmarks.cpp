#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "anovagp/benchmarks.hpp"
#include "anovagp/checks.hpp"
#include "anovagp/errors.hpp"
#include "test_util.hpp"

using namespace anovagp;
using namespace anovagp::testing;

namespace {

double direct_overflow(double q, double ks, double zv, double zm, double hd, double cb, double l, double b) {
  const double h = std::pow(q / (b * ks * std::sqrt((zm - zv) / l)), 0.6);
  return zv + h - hd - cb;
}

double reference_of(const std::vector<ReferenceIndex>& refs, const Subset& u) {
  for (const auto& r : refs) {
    if (r.u == u) {
      return r.value;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

} // namespace

TEST(Ishigami, Values) {
  const double h = std::numbers::pi / 2;
  EXPECT_EQ(ishigami(0, 0, 0), 0.0);
  EXPECT_NEAR(ishigami(h, 0, 0), 1.0, 1e-15);
  EXPECT_NEAR(ishigami(h, h, 0), 8.0, 1e-14);
  EXPECT_NEAR(ishigami(1.0, -2.0, 0.5), std::sin(1.0) + 7 * std::pow(std::sin(-2.0), 2) + 0.1 * 0.0625 * std::sin(1.0),
              1e-14);
  const double tied[] = {0.4, 1.1};
  EXPECT_NEAR(ishigami_tied_function().evaluate(tied), ishigami(0.4, 0.4, 1.1), 1e-15);
}

TEST(Ishigami, AnalyticalIndices) {
  const auto refs = ishigami_analytical_indices();
  // Independent closed forms with a = 7, b = 0.1 on U(-pi, pi).
  const double pi4 = std::pow(std::numbers::pi, 4);
  const double v1 = 0.5 * std::pow(1 + 0.1 * pi4 / 5, 2);
  const double v2 = 49.0 / 8;
  const double v13 = 0.01 * pi4 * pi4 * (1.0 / 18 - 1.0 / 50);
  const double v = v1 + v2 + v13;
  EXPECT_NEAR(reference_of(refs, Subset{0}), v1 / v, 1e-12);
  EXPECT_NEAR(reference_of(refs, Subset{1}), v2 / v, 1e-12);
  EXPECT_NEAR(reference_of(refs, Subset{0, 2}), v13 / v, 1e-12);
  EXPECT_NEAR(reference_of(refs, Subset{1}), 0.442, 1e-3);
  EXPECT_NEAR(reference_of(refs, Subset{0}), 0.314, 1e-3);
  EXPECT_NEAR(reference_of(refs, Subset{0, 2}), 0.244, 1e-3);
  EXPECT_EQ(reference_of(refs, Subset{2}), 0.0);
  EXPECT_EQ(reference_of(refs, Subset{0, 1}), 0.0);
  EXPECT_EQ(reference_of(refs, Subset{1, 2}), 0.0);
  double total = 0.0;
  for (const auto& r : refs) {
    total += r.value;
  }
  EXPECT_NEAR(total, 1.0, 1e-3);
}

TEST(Flood, OverflowFormula) {
  const double s = flood_overflow(1013, 30, 50, 55, 8, 55.5, 5000, 300);
  EXPECT_NEAR(s, direct_overflow(1013, 30, 50, 55, 8, 55.5, 5000, 300), 1e-12);
  EXPECT_NEAR(s, -11.36, 0.01);
  EXPECT_NEAR(flood_overflow(1013, 30, 50, 55, 16, 55.5, 5000, 300), s - 8.0, 1e-12);
  EXPECT_THROW(flood_overflow(1013, 30, 50, 50, 8, 55.5, 5000, 300), DataError);
  EXPECT_THROW(flood_overflow(1013, 0, 50, 55, 8, 55.5, 5000, 300), DataError);
  EXPECT_THROW(flood_overflow(-1, 30, 50, 55, 8, 55.5, 5000, 300), DataError);
}

TEST(Flood, Monotonicity) {
  const auto ms = flood_marginals();
  ASSERT_EQ(ms.size(), 8U);
  std::vector<double> x;
  for (const auto& m : ms) {
    x.push_back(m.inverse_cdf(0.5));
  }
  auto eval = [&](int i, double p) {
    auto y = x;
    y[static_cast<std::size_t>(i)] = ms[static_cast<std::size_t>(i)].inverse_cdf(p);
    return flood_function().evaluate(y);
  };
  for (double p = 0.01; p < 0.98; p += 0.05) {
    EXPECT_LT(eval(0, p), eval(0, p + 0.01));
    EXPECT_GT(eval(1, p), eval(1, p + 0.01));
    EXPECT_GT(eval(4, p), eval(4, p + 0.01));
  }
}

TEST(Flood, InputCorrelations) {
  Rng rng(3);
  const Eigen::MatrixXd x = flood_inputs(5, 100000).sample(200000, rng);
  auto corr = [&](int a, int b) {
    return pearson_correlation(std::span<const double>(x.col(a).data(), static_cast<std::size_t>(x.rows())),
                               std::span<const double>(x.col(b).data(), static_cast<std::size_t>(x.rows())));
  };
  EXPECT_NEAR(corr(0, 1), 0.5, 0.015);
  EXPECT_NEAR(corr(2, 3), 0.3, 0.015);
  EXPECT_NEAR(corr(6, 7), 0.3, 0.015);
  EXPECT_NEAR(corr(0, 4), 0.0, 0.015);
}

TEST(PickFreeze, IshigamiIndices) {
  const JointDistribution joint(uniform_pi_marginals(3), IndependentCopula{});
  const auto refs = ishigami_analytical_indices();
  Rng rng(4);
  for (const auto& u : {Subset{0}, Subset{2}, Subset{1}, Subset{0, 2}}) {
    EXPECT_NEAR(pick_freeze_sobol(ishigami_function(), joint, u, 1000000, rng), reference_of(refs, u), 0.01)
        << u.label();
  }
}

TEST(PickFreeze, AdditiveFunctionHasNoInteraction) {
  const TestFunction additive{"additive", 2, [](std::span<const double> x) { return std::exp(x[0]) + x[1] * x[1]; },
                              {{0, 1}, {0, 1}}};
  const JointDistribution joint(std::vector<Marginal>(2, Marginal(Uniform{0, 1})), IndependentCopula{});
  Rng rng(5);
  EXPECT_NEAR(pick_freeze_sobol(additive, joint, Subset{0, 1}, 200000, rng), 0.0, 0.01);
}

TEST(PickFreeze, RejectsDependentInputs) {
  const JointDistribution joint(uniform_pi_marginals(3), EqualityCopula{{{0, 1}}});
  Rng rng(6);
  EXPECT_THROW(pick_freeze_sobol(ishigami_function(), joint, Subset{0}, 1000, rng), ConfigError);
}

TEST(DesignFromUnit, MapsThroughInverseCdf) {
  const auto ms = flood_marginals();
  Eigen::MatrixXd unit = Eigen::MatrixXd::Constant(2, 8, 0.5);
  unit.row(1).setConstant(0.9);
  const DesignSet d = design_from_unit(unit, ms);
  for (int c = 0; c < 8; ++c) {
    EXPECT_NEAR(d.points(0, c), ms[static_cast<std::size_t>(c)].inverse_cdf(0.5), 1e-12);
    EXPECT_NEAR(d.points(1, c), ms[static_cast<std::size_t>(c)].inverse_cdf(0.9), 1e-12);
    EXPECT_TRUE(std::isfinite(d.bounds[static_cast<std::size_t>(c)].first));
    EXPECT_TRUE(std::isfinite(d.bounds[static_cast<std::size_t>(c)].second));
  }
}

TEST(Checks, Table1Thresholds) {
  Table1Report report;
  report.q2 = 0.97;
  IndexRow row;
  row.u = Subset{0};
  row.reference = 0.314;
  row.has_reference = true;
  row.pooled.mode = 0.33;
  report.rows = {row};
  EXPECT_TRUE(all_passed(check_report(report)));
  report.rows[0].pooled.mode = 0.35;
  EXPECT_FALSE(all_passed(check_report(report)));
  report.rows[0].pooled.mode = 0.314;
  report.q2 = 0.9;
  EXPECT_FALSE(all_passed(check_report(report)));
}

TEST(Checks, CoverageOrdering) {
  CoverageReport report;
  report.repetitions = 10;
  report.rows = {{Subset{0}, 0.3, 9, 7, 5}, {Subset{1}, 0.4, 8, 8, 8}};
  EXPECT_TRUE(all_passed(check_report(report)));
  report.rows[1].covered_mean = 9;
  EXPECT_FALSE(all_passed(check_report(report)));
}
