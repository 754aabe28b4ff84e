#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "anovagp/design.hpp"
#include "anovagp/kernels.hpp"
#include "anovagp/linalg.hpp"
#include "anovagp/random.hpp"
#include "anovagp/subset.hpp"

namespace anovagp {

/// Kernel family for one input: base kind, centering mode, the marginal
/// the base kernel is centered against, and an optional fixed length-scale
/// (estimated when absent).
struct KernelSpec {
  BaseKind kind = BaseKind::Gaussian;
  Centering centering = Centering::closed_form();
  Marginal marginal{Uniform{0.0, 1.0}};
  std::optional<double> theta;
};

/// Builds sigma2 * prod_i (1 + k0_i) with the given length-scales.
AnovaKernel make_kernel(const std::vector<KernelSpec>& specs, std::span<const double> theta,
                        double sigma2);

/// Gaussian process conditioned on noiseless observations y at the design
/// points, with constant prior mean f0:
///   mu(x)      = f0 + k_n(x)^T alpha,   alpha = K_n^{-1} (y - f0 1)
///   s^2(x, x') = k(x, x') - k_n(x)^T K_n^{-1} k_n(x')
/// An empty design gives the prior process.
class FittedGP {
public:
  FittedGP(DesignSet design, Eigen::VectorXd y, AnovaKernel kernel, double f0,
           const NuggetPolicy& policy = {});

  int dim() const { return kernel_.dim(); }
  Eigen::Index size() const { return y_.size(); }
  const DesignSet& design() const { return design_; }
  const Eigen::VectorXd& y() const { return y_; }
  const AnovaKernel& kernel() const { return kernel_; }
  double f0() const { return f0_; }
  double sigma2() const { return kernel_.sigma2(); }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const StabilizedCholesky& cholesky() const { return chol_; }
  double nugget() const { return chol_.nugget; }
  double relative_nugget() const { return chol_.relative_nugget; }
  const EmbeddedPoints& design_embedding() const { return design_embedding_; }

  double predictive_mean(std::span<const double> x) const;
  Eigen::VectorXd predictive_mean(const Eigen::MatrixXd& points) const;

  double predictive_cov(std::span<const double> x, std::span<const double> y) const;
  Eigen::MatrixXd predictive_cov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const;

  /// mu_0 = f0 + sigma2 1^T alpha, the constant term of the mean.
  double mean_constant() const;
  /// mu_u(x_u) = sigma2 (prod_{i in u} k0_i(x_i, D_i))^T alpha; x_u holds
  /// the |u| coordinates of u in increasing index order.
  double mean_component(const Subset& u, std::span<const double> x_u) const;
  /// mu_u at each row of a full p-column matrix.
  Eigen::VectorXd mean_component(const Subset& u, const Eigen::MatrixXd& points) const;

  /// Solves K_n v = rhs with the stored factor.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

private:
  void check_dim(Eigen::Index cols) const;

  DesignSet design_;
  Eigen::VectorXd y_;
  AnovaKernel kernel_;
  double f0_;
  EmbeddedPoints design_embedding_;
  StabilizedCholesky chol_;
  Eigen::VectorXd alpha_;
};

/// Q^2 = 1 - sum (f - mu)^2 / sum (f - mean f)^2 on a test set.
double q2_score(const FittedGP& model, const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs);

/// Predictive-mean index V[mu_u] / V[mu] estimated on `sample` (m >= 100).
double durrande_index(const FittedGP& model, const Subset& u, const Eigen::MatrixXd& sample);

struct MleOptions {
  int starts = 20;
  /// Per-dimension (lo, hi) for theta; empty means [1e-2, 1e2] x input range.
  std::vector<Bounds> theta_bounds;
  int max_iterations = 100;
  NuggetPolicy nugget;
  int threads = 1;
};

struct FitResult {
  FittedGP model;
  std::vector<double> theta;
  /// L(theta) = n log sigma2_hat + log det R at the returned theta.
  double objective = 0.0;
  int evaluations = 0;
  /// Every objective value computed during the search (+inf on failure).
  std::vector<double> probed;
};

/// Concentrated log-likelihood criterion at theta, with the matching
/// estimates of f0 and sigma2; R is the unit-variance kernel matrix.
struct ProfileLikelihood {
  double objective;
  double f0;
  double sigma2;
};
ProfileLikelihood profile_likelihood(const DesignSet& design, const Eigen::VectorXd& y,
                                     const std::vector<KernelSpec>& specs,
                                     std::span<const double> theta, const NuggetPolicy& nugget = {});

/// Maximum-likelihood fit of f0, sigma2 and the free length-scales.
/// Multi-start quasi-Newton search in log(theta); throws DataError for
/// constant or too few observations.
FitResult fit_mle(const DesignSet& design, const Eigen::VectorXd& y,
                  const std::vector<KernelSpec>& specs, const MleOptions& options, Rng& rng);

} // namespace anovagp
