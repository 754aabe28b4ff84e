#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "anovagp/conditional.hpp"
#include "anovagp/distributions.hpp"
#include "anovagp/gp.hpp"
#include "anovagp/subset.hpp"

namespace anovagp {

using Vector6d = Eigen::Matrix<double, 6, 1>;

/// Plug-in (1/m) estimate of one index on one realization, with its split
/// into the variance term V(f_u)/V(f) and the covariance term
/// Cov(f_u, f_uc)/V(f).
struct IndexRealization {
  double value = 0.0;
  double variance_part = 0.0;
  double covariance_part = 0.0;
  /// Asymptotic variance of sqrt(m) (estimate - truth).
  double delta_variance = 0.0;
  Eigen::Index m = 0;
  Subset u;
  std::uint64_t seed = 0;
};

/// [V(f_u) + Cov(f_u, f_uc)] / V(f) with f = f_u + f_uc; throws
/// NumericalError when V(f) = 0.
IndexRealization plugin_index(const Eigen::VectorXd& f_u, const Eigen::VectorXd& f_uc);
IndexRealization index_from_realization(const ComponentRealization& realization);

/// phi(U) = (u4 - u1^2 + u6 - u1 u2) / (u5 - u3^2), the index as a
/// function of the means of U = (f_u, f_uc, f, f_u^2, f^2, f_u f_uc).
double index_functional(const Vector6d& moments);
Vector6d index_gradient(const Vector6d& moments);

/// Sample means of U.
Vector6d index_moments(const Eigen::VectorXd& f_u, const Eigen::VectorXd& f_uc);

/// grad(phi)^T Gamma grad(phi) with Gamma the (1/m) covariance of U.
double delta_variance(const Eigen::VectorXd& f_u, const Eigen::VectorXd& f_uc);
double delta_variance(const ComponentRealization& realization);

struct EstimationOptions {
  Eigen::Index m = 10000;
  int realizations = 200; // N_s
  int perturbations = 200; // K
  /// Draw a fresh Monte-Carlo sample for every realization instead of
  /// reusing one sample across all of them.
  bool redraw_sample = false;
  int threads = 1;
  SamplerOptions sampler;
};

/// N_s realizations of one index, each with K draws of
/// value + N(0, delta_variance / m).
struct IndexDistribution {
  Subset u;
  std::vector<IndexRealization> realizations;
  Eigen::MatrixXd perturbed; // N_s x K

  Eigen::VectorXd values() const;
};

/// Estimates one index on a Monte-Carlo sample drawn from `joint`.
/// Seeds: the sample uses derive_seed(seed, 0), realization r uses
/// derive_seed(seed, r + 1) and its perturbations derive from that.
IndexDistribution estimate_index(const FittedGP& model, const Subset& u, const JointDistribution& joint,
                                 const EstimationOptions& options, std::uint64_t seed);
/// Same with a caller-supplied fixed sample T.
IndexDistribution estimate_index(const FittedGP& model, const Subset& u, const Eigen::MatrixXd& T,
                                 const EstimationOptions& options, std::uint64_t seed);

/// Every index from shared joint draws of the full decomposition (p <= 4),
/// in all_subsets order. Per realization the values sum to one.
std::vector<IndexDistribution> estimate_all_indices_consistent(const FittedGP& model,
                                                               const JointDistribution& joint,
                                                               const EstimationOptions& options,
                                                               std::uint64_t seed);
std::vector<IndexDistribution> estimate_all_indices_consistent(const FittedGP& model,
                                                               const Eigen::MatrixXd& T,
                                                               const EstimationOptions& options,
                                                               std::uint64_t seed);

/// Argmax of a normal-kernel density estimate with bandwidth
/// 1.06 sd N^{-1/5} over a 1024-point grid on [min - 3h, max + 3h].
double kde_mode(std::span<const double> values);

/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::span<const double> values, double prob);

struct IndexSummary {
  double mode = 0.0;
  double mean = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  /// Split of the realization closest to the mode.
  double variance_part = 0.0;
  double covariance_part = 0.0;
};

/// Mode and quantiles of the pooled perturbed values.
IndexSummary summarize(const IndexDistribution& dist);
/// Mode and quantiles of the realization values alone (meta-model error only).
IndexSummary summarize_realizations(const IndexDistribution& dist);

} // namespace anovagp
