#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "anovagp/errors.hpp"
#include "anovagp/kernels.hpp"
#include "anovagp/random.hpp"
#include "anovagp/subset.hpp"
#include "test_util.hpp"

using namespace anovagp;
using anovagp::testing::simpson;

namespace {

double centered_integral(const CenteredKernel& k, double y) {
  // Split at y so the exponential kink sits on a node.
  const auto [a, b] = k.marginal().support();
  auto f = [&](double x) { return k(x, y) * k.marginal().pdf(x); };
  double total = 0.0;
  if (y > a) total += simpson(f, a, y, 4000);
  if (y < b) total += simpson(f, y, b, 4000);
  return total;
}

double min_eigen_ratio(const Eigen::MatrixXd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  return es.eigenvalues().minCoeff() / g.trace();
}

} // namespace

TEST(BaseKernel, ExponentialValue) {
  EXPECT_NEAR(BaseKernel(BaseKind::Exponential, 1.0)(0.0, 2.0), std::exp(-1.0), 1e-15);
}

TEST(BaseKernel, GaussianValue) {
  EXPECT_NEAR(BaseKernel(BaseKind::Gaussian, 1.0)(0.0, 1.0), std::exp(-0.5), 1e-15);
}

TEST(BaseKernel, MaternValues) {
  const double r3 = std::sqrt(3.0) * 0.7 / 1.3;
  EXPECT_NEAR(BaseKernel(BaseKind::Matern32, 1.3)(0.2, 0.9), (1 + r3) * std::exp(-r3), 1e-14);
  const double r5 = std::sqrt(5.0) * 0.7 / 1.3;
  EXPECT_NEAR(BaseKernel(BaseKind::Matern52, 1.3)(0.9, 0.2), (1 + r5 + r5 * r5 / 3) * std::exp(-r5), 1e-14);
}

TEST(BaseKernel, UnitDiagonalAndSymmetry) {
  for (auto kind : {BaseKind::Exponential, BaseKind::Gaussian, BaseKind::Matern32, BaseKind::Matern52}) {
    const BaseKernel k(kind, 0.8);
    EXPECT_DOUBLE_EQ(k(1.7, 1.7), 1.0);
    EXPECT_DOUBLE_EQ(k(0.3, -1.1), k(-1.1, 0.3));
    EXPECT_GT(k(0.0, 5.0), 0.0);
    EXPECT_LT(k(0.0, 5.0), 1.0);
  }
}

TEST(BaseKernel, RejectsNonpositiveTheta) {
  EXPECT_THROW(BaseKernel(BaseKind::Gaussian, 0.0), ConfigError);
  EXPECT_THROW(BaseKernel(BaseKind::Gaussian, -1.0), ConfigError);
  EXPECT_THROW(parse_base_kind("cubic"), ConfigError);
}

TEST(CenteredKernel, ClosedFormIntegratesToZero) {
  const Marginal m = anovagp::testing::uniform_pi();
  const CenteredKernel exp_k(BaseKernel(BaseKind::Exponential, 1.0), m, Centering::closed_form());
  const CenteredKernel gauss_k(BaseKernel(BaseKind::Gaussian, 1.5), m, Centering::closed_form());
  for (int i = 0; i < 20; ++i) {
    const double y = -std::numbers::pi + (i + 0.5) * 2 * std::numbers::pi / 20;
    EXPECT_LT(std::abs(centered_integral(exp_k, y)), 1e-8) << y;
    EXPECT_LT(std::abs(centered_integral(gauss_k, y)), 1e-8) << y;
  }
  EXPECT_LT(std::abs(centered_integral(exp_k, 0.3)), 1e-8);
}

TEST(CenteredKernel, ClosedFormMatchesQuadrature) {
  for (auto kind : {BaseKind::Exponential, BaseKind::Gaussian}) {
    for (const Marginal& m : {Marginal(Uniform{0.0, 1.0}), anovagp::testing::uniform_pi()}) {
      const CenteredKernel cf(BaseKernel(kind, 1.5), m, Centering::closed_form());
      const CenteredKernel qd(BaseKernel(kind, 1.5), m, Centering::quadrature(512));
      const auto [a, b] = m.support();
      double worst = 0.0;
      for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
          const double x = a + (i + 0.5) * (b - a) / 20;
          const double y = a + (j + 0.5) * (b - a) / 20;
          worst = std::max(worst, std::abs(cf(x, y) - qd(x, y)));
        }
      }
      EXPECT_LT(worst, 1e-6);
    }
  }
  const Marginal unit(Uniform{0.0, 1.0});
  const CenteredKernel cf(BaseKernel(BaseKind::Gaussian, 1.5), unit, Centering::closed_form());
  const CenteredKernel qd(BaseKernel(BaseKind::Gaussian, 1.5), unit, Centering::quadrature(512));
  EXPECT_NEAR(cf(0.2, 0.7), qd(0.2, 0.7), 1e-6);
}

TEST(CenteredKernel, GaussianClosedFormMatchesDirectFormula) {
  // E(x) = theta sqrt(pi/2) [erf((b-x)/(sqrt2 theta)) + erf((x-a)/(sqrt2 theta))] / (b-a)
  const double a = 0.0, b = 1.0, t = 1.5;
  auto e = [&](double x) {
    return t * std::sqrt(std::numbers::pi / 2) *
           (std::erf((b - x) / (std::sqrt(2.0) * t)) + std::erf((x - a) / (std::sqrt(2.0) * t))) / (b - a);
  };
  const double big_b = simpson([&](double x) { return e(x); }, a, b, 2000) / (b - a);
  const double expected = std::exp(-0.25 / (2 * t * t)) - e(0.2) * e(0.7) / big_b;
  const CenteredKernel cf(BaseKernel(BaseKind::Gaussian, t), Marginal(Uniform{a, b}), Centering::closed_form());
  EXPECT_NEAR(cf(0.2, 0.7), expected, 1e-12);
}

TEST(CenteredKernel, QuadratureOnTriangularIsCenteredAndPositive) {
  const Marginal tri(Triangular{0.0, 0.5, 1.0});
  const CenteredKernel k(BaseKernel(BaseKind::Gaussian, 0.3), tri, Centering::quadrature());
  EXPECT_GT(k(0.5, 0.5), 0.0);
  for (double y : {0.05, 0.3, 0.5, 0.77}) {
    // Density kink at 0.5: integrate the two linear pieces separately.
    auto f = [&](double x) { return k(x, y) * tri.pdf(x); };
    EXPECT_LT(std::abs(simpson(f, 0.0, 0.5, 2000) + simpson(f, 0.5, 1.0, 2000)), 1e-8);
  }
}

TEST(CenteredKernel, QuadratureOnTruncatedNormalIsCentered) {
  const Marginal m(TruncatedNormal{30.0, 8.0, 15.0, std::numeric_limits<double>::infinity()});
  const CenteredKernel k(BaseKernel(BaseKind::Matern52, 5.0), m, Centering::quadrature());
  for (double y : {16.0, 30.0, 55.0}) {
    auto f = [&](double x) { return k(x, y) * m.pdf(x); };
    EXPECT_LT(std::abs(simpson(f, 15.0, y, 4000) + simpson(f, y, 130.0, 8000)), 1e-8);
  }
}

TEST(CenteredKernel, ClosedFormRequiresUniformMarginal) {
  EXPECT_THROW(CenteredKernel(BaseKernel(BaseKind::Gaussian, 1.0), Marginal(Triangular{0, 0.5, 1}),
                              Centering::closed_form()),
               ConfigError);
  EXPECT_THROW(CenteredKernel(BaseKernel(BaseKind::Matern32, 1.0), Marginal(Uniform{0, 1}),
                              Centering::closed_form()),
               ConfigError);
}

TEST(AnovaKernel, ProductAndExpansionIdentity) {
  const auto specs = kernel_specs_for(anovagp::testing::uniform_pi_marginals(3), BaseKind::Gaussian);
  const std::vector<double> theta{0.9, 1.4, 2.2};
  const AnovaKernel k = make_kernel(specs, theta, 2.5);
  Rng rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x{u(rng), u(rng), u(rng)}, y{u(rng), u(rng), u(rng)};
    double product = 2.5;
    for (int d = 0; d < 3; ++d) {
      product *= 1.0 + k.component(d)(x[d], y[d]);
    }
    EXPECT_NEAR(k(x, y), product, 1e-12);
    double expansion = 2.5;
    for (const auto& s : all_subsets(3)) {
      std::vector<double> xs, ys;
      double direct = 2.5;
      for (int i : s.indices()) {
        xs.push_back(x[static_cast<std::size_t>(i)]);
        ys.push_back(y[static_cast<std::size_t>(i)]);
        direct *= k.component(i)(x[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(i)]);
      }
      EXPECT_NEAR(k.subset(s, xs, ys), direct, 1e-12);
      expansion += k.subset(s, xs, ys);
    }
    EXPECT_NEAR(k(x, y), expansion, 1e-12);
  }
}

TEST(AnovaKernel, SingleInputDiagonal) {
  const CenteredKernel c(BaseKernel(BaseKind::Exponential, 0.7), Marginal(Uniform{0, 1}), Centering::closed_form());
  const AnovaKernel k(2.0, {c});
  const std::vector<double> x{0.4};
  EXPECT_NEAR(k(x, x), 2.0 * (1.0 + c(0.4, 0.4)), 1e-14);
}

TEST(AnovaKernel, GramMatricesArePositiveSemidefinite) {
  std::vector<Marginal> marginals{Marginal(Uniform{0, 1}), Marginal(Triangular{0, 0.3, 1}),
                                  Marginal(TruncatedGumbel{1013, 558, 500, 3000})};
  std::vector<KernelSpec> specs{{BaseKind::Exponential, Centering::closed_form(), marginals[0], {}},
                                {BaseKind::Matern32, Centering::quadrature(), marginals[1], {}},
                                {BaseKind::Matern52, Centering::quadrature(), marginals[2], {}}};
  const std::vector<double> theta{0.3, 0.2, 400.0};
  const AnovaKernel k = make_kernel(specs, theta, 1.7);
  Rng rng(3);
  const Eigen::MatrixXd pts = JointDistribution(marginals, IndependentCopula{}).sample(100, rng);
  const auto e = k.embed(pts);
  EXPECT_GE(min_eigen_ratio(k.gram(e, e)), -1e-8);
  for (int d = 0; d < 3; ++d) {
    EXPECT_GE(min_eigen_ratio(k.centered_gram(d, e, e)), -1e-8);
  }
  EXPECT_GE(min_eigen_ratio(k.subset_gram(Subset{0, 2}, e, e)), -1e-8);
  EXPECT_GE(min_eigen_ratio(k.subset_gram(Subset{1}, e, e)), -1e-8);
  const Eigen::MatrixXd g = k.gram(e, e);
  EXPECT_LT((g - g.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(AnovaKernel, RejectsDimensionMismatch) {
  const auto specs = kernel_specs_for(anovagp::testing::uniform_pi_marginals(2), BaseKind::Gaussian);
  const std::vector<double> theta{1.0, 1.0};
  const AnovaKernel k = make_kernel(specs, theta, 1.0);
  const std::vector<double> x{0.0, 0.0, 0.0};
  EXPECT_THROW((void)k(x, x), DataError);
}
