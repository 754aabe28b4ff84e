#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace anovagp {

/// Diagonal inflation schedule, relative to the mean diagonal of the
/// matrix: start at `initial`, multiply by `factor` on failure, give up
/// beyond `maximum`.
struct NuggetPolicy {
  double initial = 1e-10;
  double maximum = 1e-4;
  double factor = 10.0;
};

/// Cholesky factor of K + nugget * I.
struct StabilizedCholesky {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double relative_nugget = 0.0; // fraction of the mean diagonal
  double nugget = 0.0;          // absolute value added to the diagonal

  Eigen::MatrixXd lower() const { return llt.matrixL(); }
  double log_determinant() const;
};

/// Throws NumericalError when no nugget within the policy yields a
/// positive-definite factorization.
StabilizedCholesky stabilized_cholesky(const Eigen::MatrixXd& matrix, const NuggetPolicy& policy);

/// Rank-revealing (diagonally pivoted) Cholesky of a PSD matrix given
/// implicitly by its diagonal and a column oracle:
///   A ~= F F^T,  F = factor() (N x r, rows in original order).
/// Pivoting stops once every residual diagonal entry falls below
/// `relative_tolerance * max(diag(A))`, so the neglected covariance is PSD
/// with entries bounded by that threshold. Exact duplicate rows of A yield
/// identical rows of F.
class PivotedCholesky {
public:
  using ColumnOracle = std::function<void(Eigen::Index column, Eigen::Ref<Eigen::VectorXd> out)>;

  PivotedCholesky(const Eigen::VectorXd& diagonal, const ColumnOracle& column,
                  double relative_tolerance, Eigen::Index max_rank = -1);

  Eigen::Index size() const { return factor_.rows(); }
  Eigen::Index rank() const { return factor_.cols(); }
  const Eigen::MatrixXd& factor() const { return factor_; }
  const std::vector<Eigen::Index>& pivots() const { return pivots_; }
  /// Largest residual diagonal entry at termination.
  double residual() const { return residual_; }

  /// F * eps.head(rank); eps must have at least rank() entries.
  Eigen::VectorXd apply(const Eigen::VectorXd& eps) const;

private:
  Eigen::MatrixXd factor_;
  std::vector<Eigen::Index> pivots_;
  double residual_ = 0.0;
};

} // namespace anovagp
