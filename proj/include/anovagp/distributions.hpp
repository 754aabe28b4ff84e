#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "anovagp/random.hpp"

namespace anovagp {

struct Uniform {
  double a;
  double b;
};

/// Triangular law on [a, b] with mode c.
struct Triangular {
  double a;
  double c;
  double b;
};

/// Normal(mean, sd) restricted to [lo, hi]; either bound may be infinite.
struct TruncatedNormal {
  double mean;
  double sd;
  double lo;
  double hi;
};

/// Max-type Gumbel(loc, scale) restricted to [lo, hi].
struct TruncatedGumbel {
  double loc;
  double scale;
  double lo;
  double hi;
};

double normal_cdf(double z);
/// Upper tail 1 - Phi(z), accurate for large z.
double normal_sf(double z);
double normal_quantile(double p);

/// One-dimensional input law with density, CDF and inverse CDF.
class Marginal {
public:
  using Params = std::variant<Uniform, Triangular, TruncatedNormal, TruncatedGumbel>;

  explicit Marginal(Params params);

  const Params& params() const { return params_; }
  bool is_uniform() const { return std::holds_alternative<Uniform>(params_); }
  std::string describe() const;

  double pdf(double x) const;
  double cdf(double x) const;
  /// Requires 0 < prob < 1; throws ConfigError otherwise.
  double inverse_cdf(double prob) const;

  /// Support interval; bounds may be infinite.
  std::pair<double, double> support() const;

  /// Sorted finite breakpoints covering the numerically relevant mass:
  /// support endpoints (infinite tails cut where the density is below
  /// double precision) plus interior kinks of the density.
  const std::vector<double>& integration_breaks() const { return breaks_; }

private:
  Params params_;
  double lower_mass_ = 0.0; // untruncated CDF at lo
  double upper_mass_ = 1.0; // untruncated CDF at hi
  double lower_tail_ = 1.0; // untruncated survival at lo
  double upper_tail_ = 0.0; // untruncated survival at hi
  std::vector<double> breaks_;
};

struct IndependentCopula {};

struct GaussianCopula {
  Eigen::MatrixXd correlation;
};

/// Exchangeable Clayton dependence among `indices` (a pair is the common
/// case), sampled through a shared gamma frailty.
struct ClaytonGroup {
  std::vector<int> indices;
  double theta;
};

struct ClaytonCopula {
  std::vector<ClaytonGroup> groups;
};

/// X_j = X_i (same uniform) for each listed (i, j).
struct EqualityCopula {
  std::vector<std::pair<int, int>> pairs;
};

using Copula = std::variant<IndependentCopula, GaussianCopula, ClaytonCopula, EqualityCopula>;

class JointDistribution {
public:
  JointDistribution(std::vector<Marginal> marginals, Copula copula);

  int dim() const { return static_cast<int>(marginals_.size()); }
  const std::vector<Marginal>& marginals() const { return marginals_; }
  const Marginal& marginal(int i) const { return marginals_.at(i); }
  const Copula& copula() const { return copula_; }
  bool independent() const { return std::holds_alternative<IndependentCopula>(copula_); }

  /// m x p matrix of copula uniforms, one row per realization.
  Eigen::MatrixXd sample_uniforms(Eigen::Index m, Rng& rng) const;
  /// m x p matrix of inputs in natural units.
  Eigen::MatrixXd sample(Eigen::Index m, Rng& rng) const;

private:
  std::vector<Marginal> marginals_;
  Copula copula_;
  Eigen::MatrixXd gaussian_factor_; // correlation = F F^T, Gaussian copula only
};

/// Gaussian-copula correlation 2 sin(pi rho_s / 6) for Spearman's rho_s.
double spearman_to_gaussian_param(double rho_s);

/// Spearman's rho of the bivariate Clayton copula, 12 * int C - 3, by
/// tensor Gauss-Legendre quadrature on the unit square.
double clayton_spearman(double theta, int nodes = 256);

/// Inverts clayton_spearman by bisection in log(theta) over [1e-6, 1e3].
double spearman_to_clayton_param(double rho_s);

/// Gaussian-copula parameter for which the sampled Pearson correlation of
/// (X_i, X_j) equals `target`. Bisection on a fixed common-random-number
/// sample of size `samples`.
double match_pearson_gaussian(const Marginal& first, const Marginal& second, double target,
                              Eigen::Index samples, std::uint64_t seed);

double pearson_correlation(std::span<const double> x, std::span<const double> y);
double spearman_correlation(std::span<const double> x, std::span<const double> y);

} // namespace anovagp
