#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "anovagp/distributions.hpp"
#include "anovagp/errors.hpp"
#include "anovagp/random.hpp"

using namespace anovagp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Marginal> all_marginals() {
  return {Marginal(Uniform{-std::numbers::pi, std::numbers::pi}), Marginal(Triangular{49, 50, 51}),
          Marginal(Triangular{0, 0.2, 1}), Marginal(TruncatedNormal{30, 8, 15, kInf}),
          Marginal(TruncatedNormal{0, 1, -kInf, kInf}), Marginal(TruncatedGumbel{1013, 558, 500, 3000})};
}

double ks_statistic(std::vector<double> x, const Marginal& m) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = m.cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

std::vector<double> column(const Eigen::MatrixXd& x, int c) {
  return std::vector<double>(x.col(c).data(), x.col(c).data() + x.rows());
}

} // namespace

TEST(Marginal, InverseCdfExamples) {
  EXPECT_NEAR(Marginal(Uniform{-std::numbers::pi, std::numbers::pi}).inverse_cdf(0.5), 0.0, 1e-14);
  EXPECT_NEAR(Marginal(Triangular{49, 50, 51}).inverse_cdf(0.5), 50.0, 1e-12);
  EXPECT_THROW(Marginal(Uniform{0, 1}).inverse_cdf(0.0), ConfigError);
  EXPECT_THROW(Marginal(Uniform{0, 1}).inverse_cdf(1.0), ConfigError);
}

TEST(Marginal, GumbelMedianMatchesRejectionSampler) {
  // Untruncated max-Gumbel by inversion, rejected outside [500, 3000].
  Rng rng(11);
  std::vector<double> kept;
  while (kept.size() < 400000) {
    const double x = 1013.0 - 558.0 * std::log(-std::log(open_uniform(rng)));
    if (x >= 500.0 && x <= 3000.0) {
      kept.push_back(x);
    }
  }
  std::nth_element(kept.begin(), kept.begin() + kept.size() / 2, kept.end());
  const double median = kept[kept.size() / 2];
  EXPECT_NEAR(Marginal(TruncatedGumbel{1013, 558, 500, 3000}).inverse_cdf(0.5), median, 5.0);
}

TEST(Marginal, RoundTripAndMonotone) {
  for (const auto& m : all_marginals()) {
    double previous = -kInf;
    const auto [lo, hi] = m.support();
    for (int i = 1; i <= 99; ++i) {
      const double p = i / 100.0;
      const double x = m.inverse_cdf(p);
      EXPECT_NEAR(m.cdf(x), p, 1e-10) << m.describe();
      EXPECT_GT(x, previous);
      EXPECT_GE(x, lo);
      EXPECT_LE(x, hi);
      previous = x;
    }
  }
}

TEST(Marginal, DensityIntegratesToOne) {
  for (const auto& m : all_marginals()) {
    const auto& br = m.integration_breaks();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      const int steps = 20000;
      const double h = (br[i + 1] - br[i]) / steps;
      for (int k = 0; k < steps; ++k) {
        total += h * m.pdf(br[i] + (k + 0.5) * h);
      }
    }
    EXPECT_NEAR(total, 1.0, 1e-6) << m.describe();
  }
}

TEST(Marginal, RejectsInvalidParameters) {
  EXPECT_THROW(Marginal(Uniform{1, 1}), ConfigError);
  EXPECT_THROW(Marginal(Triangular{0, 2, 1}), ConfigError);
  EXPECT_THROW(Marginal(TruncatedNormal{0, -1, -1, 1}), ConfigError);
  EXPECT_THROW(Marginal(TruncatedGumbel{0, 1, 2, 1}), ConfigError);
}

TEST(JointDistribution, MarginalsSurviveEveryCopula) {
  const auto ms = all_marginals();
  Eigen::MatrixXd corr = Eigen::MatrixXd::Constant(6, 6, 0.5);
  corr.diagonal().setOnes();
  for (const Copula& c : std::vector<Copula>{IndependentCopula{}, GaussianCopula{corr},
                                             ClaytonCopula{{{{0, 1, 2}, 2.0}, {{3, 5}, 1.0}}}}) {
    Rng rng(5);
    const Eigen::MatrixXd x = JointDistribution(ms, c).sample(10000, rng);
    for (int d = 0; d < 6; ++d) {
      EXPECT_LT(ks_statistic(column(x, d), ms[static_cast<std::size_t>(d)]), 0.02) << d;
    }
  }
}

TEST(JointDistribution, IndependentColumnsUncorrelated) {
  Rng rng(2);
  const JointDistribution j(std::vector<Marginal>(3, Marginal(Uniform{0, 1})), IndependentCopula{});
  const Eigen::MatrixXd x = j.sample(10000, rng);
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      EXPECT_LT(std::abs(pearson_correlation(column(x, a), column(x, b))), 0.05);
    }
  }
}

TEST(JointDistribution, EqualityCopulaCopiesColumns) {
  Rng rng(2);
  const JointDistribution j(std::vector<Marginal>(3, Marginal(Uniform{-1, 1})), EqualityCopula{{{0, 1}}});
  const Eigen::MatrixXd x = j.sample(100, rng);
  EXPECT_EQ(x.col(0), x.col(1));
  EXPECT_NE(x.col(0), x.col(2));
}

TEST(JointDistribution, SameSeedSameSample) {
  Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(2, 2);
  corr(0, 1) = corr(1, 0) = 0.4;
  const JointDistribution j(std::vector<Marginal>(2, Marginal(Triangular{0, 0.5, 1})), GaussianCopula{corr});
  Rng a(99), b(99);
  EXPECT_EQ(j.sample(500, a), j.sample(500, b));
}

TEST(JointDistribution, RejectsInvalidCopulas) {
  const std::vector<Marginal> ms(3, Marginal(Uniform{0, 1}));
  Eigen::MatrixXd bad(3, 3);
  bad << 1, 0.9, -0.9, 0.9, 1, 0.9, -0.9, 0.9, 1;
  EXPECT_THROW(JointDistribution(ms, GaussianCopula{bad}), ConfigError);
  EXPECT_THROW(JointDistribution(ms, ClaytonCopula{{{{0, 1}, -1.0}}}), ConfigError);
  EXPECT_THROW(JointDistribution(ms, ClaytonCopula{{{{0, 1}, 1.0}, {{1, 2}, 1.0}}}), ConfigError);
  EXPECT_THROW(JointDistribution(ms, EqualityCopula{{{1, 1}}}), ConfigError);
  EXPECT_THROW(JointDistribution(ms, EqualityCopula{{{0, 3}}}), ConfigError);
}

TEST(Dependence, GaussianSpearmanConversion) {
  EXPECT_EQ(spearman_to_gaussian_param(0.0), 0.0);
  EXPECT_NEAR(spearman_to_gaussian_param(0.7), 2 * std::sin(0.7 * std::numbers::pi / 6), 1e-15);
  EXPECT_NEAR(spearman_to_gaussian_param(0.7), 0.7167, 1e-4);
  EXPECT_THROW(spearman_to_gaussian_param(1.0), ConfigError);
}

TEST(Dependence, GaussianCopulaReachesTargetSpearman) {
  const double r = spearman_to_gaussian_param(0.7);
  Eigen::MatrixXd corr = Eigen::MatrixXd::Constant(3, 3, r);
  corr.diagonal().setOnes();
  Rng rng(17);
  const Eigen::MatrixXd x =
      JointDistribution(std::vector<Marginal>(3, Marginal(Uniform{-std::numbers::pi, std::numbers::pi})),
                        GaussianCopula{corr})
          .sample(100000, rng);
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      const double rho = spearman_correlation(column(x, a), column(x, b));
      EXPECT_GE(rho, 0.68);
      EXPECT_LE(rho, 0.72);
    }
  }
}

TEST(Dependence, ClaytonInversion) {
  double previous = 0.0;
  for (double rho : {0.05, 0.3, 0.7, 0.9}) {
    const double theta = spearman_to_clayton_param(rho);
    EXPECT_NEAR(clayton_spearman(theta), rho, 1e-4);
    EXPECT_GT(theta, previous);
    previous = theta;
  }
  EXPECT_LT(spearman_to_clayton_param(1e-3), 0.01);
  EXPECT_THROW(spearman_to_clayton_param(0.0), ConfigError);
}

TEST(Dependence, ClaytonSampleReachesTargetSpearman) {
  const double theta = spearman_to_clayton_param(0.7);
  Rng rng(23);
  const Eigen::MatrixXd x =
      JointDistribution(std::vector<Marginal>(3, Marginal(Uniform{0, 1})), ClaytonCopula{{{{0, 1, 2}, theta}}})
          .sample(400000, rng);
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      EXPECT_NEAR(spearman_correlation(column(x, a), column(x, b)), 0.7, 0.01);
    }
  }
}

TEST(Dependence, ClaytonClosedFormKendall) {
  // Kendall's tau of Clayton is theta / (theta + 2).
  Rng rng(29);
  const double theta = 1.5;
  const Eigen::MatrixXd x =
      JointDistribution(std::vector<Marginal>(2, Marginal(Uniform{0, 1})), ClaytonCopula{{{{0, 1}, theta}}})
          .sample(3000, rng);
  double concordant = 0.0;
  double pairs = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
      concordant += ((x(i, 0) - x(j, 0)) * (x(i, 1) - x(j, 1)) > 0) ? 1.0 : -1.0;
      pairs += 1.0;
    }
  }
  EXPECT_NEAR(concordant / pairs, theta / (theta + 2), 0.03);
}

TEST(Dependence, PearsonMatching) {
  const Marginal q(TruncatedGumbel{1013, 558, 500, 3000});
  const Marginal ks(TruncatedNormal{30, 8, 15, kInf});
  const double r = match_pearson_gaussian(q, ks, 0.5, 200000, 41);
  Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(2, 2);
  corr(0, 1) = corr(1, 0) = r;
  Rng rng(43);
  const Eigen::MatrixXd x = JointDistribution({q, ks}, GaussianCopula{corr}).sample(200000, rng);
  EXPECT_NEAR(pearson_correlation(column(x, 0), column(x, 1)), 0.5, 0.01);
}
