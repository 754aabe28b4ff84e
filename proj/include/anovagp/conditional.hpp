#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "anovagp/gp.hpp"
#include "anovagp/linalg.hpp"
#include "anovagp/subset.hpp"

namespace anovagp {

struct SamplerOptions {
  /// Pivoted Cholesky stops once every residual variance is below this
  /// fraction of the largest prior variance on M.
  double rank_tolerance = 1e-10;
  /// Largest n + m accepted.
  Eigen::Index max_block = 12000;
};

/// One joint draw of (f^n, f^n_u, f^n_{u^c}) on the rows of T.
struct ComponentRealization {
  Eigen::VectorXd f;
  Eigen::VectorXd f_u;
  Eigen::VectorXd f_uc; // f - f_u
  Subset u;
  std::uint64_t seed = 0;
};

/// Samples the conditional process and its u / u^c split on T.
///
/// On M = [T; D] the prior is split into independent parts
///   z_u    ~ N(0, sigma2 K0^u(M, M)),
///   z_{uc} ~ N(0, K(M, M) - sigma2 K0^u(M, M)),
/// and with z = z_u + z_{uc}, w = K_n^{-1} z(D):
///   f^n   = mu(T)   - k(T, D) w           + z(T)
///   f^n_u = mu_u(T) - sigma2 K0^u(T, D) w + z_u(T).
/// Both covariance factors depend only on (model, u, T) and are computed
/// once; each draw costs two matrix-vector products. The normals are drawn
/// as two blocks of n + m values (z_u first); a factor of rank r consumes
/// the first r values of its block.
class ComponentSampler {
public:
  ComponentSampler(const FittedGP& model, const Subset& u, const Eigen::MatrixXd& T,
                   const SamplerOptions& options = {});

  const Subset& subset() const { return u_; }
  Eigen::Index size() const { return mu_.size(); }
  Eigen::Index rank_u() const { return factor_u_->rank(); }
  Eigen::Index rank_uc() const { return factor_uc_->rank(); }

  ComponentRealization draw(std::uint64_t seed) const;

private:
  const FittedGP* model_;
  Subset u_;
  Eigen::VectorXd mu_;
  Eigen::VectorXd mu_u_;
  Eigen::MatrixXd k_td_;   // k(T, D)
  Eigen::MatrixXd k_u_td_; // sigma2 K0^u(T, D)
  std::unique_ptr<PivotedCholesky> factor_u_;
  std::unique_ptr<PivotedCholesky> factor_uc_;
};

ComponentRealization sample_component_paths(const FittedGP& model, const Subset& u,
                                            const Eigen::MatrixXd& T, std::uint64_t seed,
                                            const SamplerOptions& options = {});

/// One joint draw of every ANOVA component of f^n on T.
struct FullDecomposition {
  Eigen::VectorXd f;
  double f0 = 0.0;
  /// f^n_u for every nonempty u, in all_subsets order.
  std::vector<Subset> subsets;
  std::vector<Eigen::VectorXd> components;
  std::uint64_t seed = 0;

  const Eigen::VectorXd& component(const Subset& u) const;
};

/// Samples Z = Z_0 + sum_u Z_u with independent Z_0 ~ N(0, sigma2) and
/// Z_u ~ GP(0, sigma2 prod_{i in u} k0_i), then conditions on Z(D):
///   f^n_0 = mu_0   - sigma2 1^T w + z_0
///   f^n_u = mu_u(T) - sigma2 K0^u(T, D) w + z_u(T),   w = K_n^{-1} Z(D).
/// Normals are drawn as z_0, then one block of n + m per subset in
/// all_subsets order. Limited to p <= 4.
class FullDecompositionSampler {
public:
  FullDecompositionSampler(const FittedGP& model, const Eigen::MatrixXd& T,
                           const SamplerOptions& options = {});

  const std::vector<Subset>& subsets() const { return subsets_; }
  Eigen::Index size() const { return mu_.size(); }

  FullDecomposition draw(std::uint64_t seed) const;

private:
  const FittedGP* model_;
  std::vector<Subset> subsets_;
  Eigen::VectorXd mu_;
  std::vector<Eigen::VectorXd> mu_u_;
  std::vector<Eigen::MatrixXd> k_u_td_;
  std::vector<std::unique_ptr<PivotedCholesky>> factors_;
};

FullDecomposition sample_full_decomposition(const FittedGP& model, const Eigen::MatrixXd& T,
                                            std::uint64_t seed, const SamplerOptions& options = {});

} // namespace anovagp
