#include "anovagp/linalg.hpp"

#include <cmath>
#include <sstream>

#include "anovagp/errors.hpp"

namespace anovagp {

double StabilizedCholesky::log_determinant() const {
  const auto& l = llt.matrixLLT();
  return 2.0 * l.diagonal().array().log().sum();
}

StabilizedCholesky stabilized_cholesky(const Eigen::MatrixXd& matrix, const NuggetPolicy& policy) {
  if (matrix.rows() != matrix.cols()) {
    throw DataError("Cholesky needs a square matrix");
  }
  const Eigen::Index n = matrix.rows();
  StabilizedCholesky out;
  if (n == 0) {
    out.llt.compute(matrix);
    return out;
  }
  const double scale = matrix.diagonal().mean();
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw NumericalError("covariance matrix has a nonpositive or non-finite diagonal");
  }
  Eigen::MatrixXd work;
  for (double rel = policy.initial; rel <= policy.maximum * (1.0 + 1e-12); rel *= policy.factor) {
    work = matrix;
    work.diagonal().array() += rel * scale;
    out.llt.compute(work);
    if (out.llt.info() == Eigen::Success &&
        out.llt.matrixLLT().diagonal().array().isFinite().all() &&
        out.llt.matrixLLT().diagonal().minCoeff() > 0.0) {
      out.relative_nugget = rel;
      out.nugget = rel * scale;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "Cholesky factorization failed with relative nugget up to " << policy.maximum;
  throw NumericalError(msg.str());
}

PivotedCholesky::PivotedCholesky(const Eigen::VectorXd& diagonal, const ColumnOracle& column,
                                 double relative_tolerance, Eigen::Index max_rank) {
  const Eigen::Index n = diagonal.size();
  if (max_rank < 0 || max_rank > n) {
    max_rank = n;
  }
  const double scale = n > 0 ? diagonal.maxCoeff() : 0.0;
  if (n > 0 && (!std::isfinite(scale) || diagonal.minCoeff() < -1e-12 * std::abs(scale))) {
    throw NumericalError("pivoted Cholesky: matrix diagonal is negative or non-finite");
  }
  const double threshold = relative_tolerance * std::max(scale, 0.0);
  Eigen::VectorXd residual = diagonal;
  // Grow the factor in chunks to avoid reallocating every step.
  Eigen::Index capacity = std::min<Eigen::Index>(max_rank, 64);
  Eigen::MatrixXd f(n, capacity);
  Eigen::VectorXd col(n);
  Eigen::Index rank = 0;
  while (rank < max_rank && n > 0) {
    Eigen::Index pivot;
    const double best = residual.maxCoeff(&pivot);
    if (!(best > threshold) || best <= 0.0) {
      break;
    }
    if (rank == capacity) {
      capacity = std::min<Eigen::Index>(max_rank, 2 * capacity);
      f.conservativeResize(Eigen::NoChange, capacity);
    }
    column(pivot, col);
    if (rank > 0) {
      col.noalias() -= f.leftCols(rank) * f.row(pivot).head(rank).transpose();
    }
    const double root = std::sqrt(best);
    f.col(rank) = col / root;
    residual -= f.col(rank).cwiseAbs2();
    residual[pivot] = 0.0;
    pivots_.push_back(pivot);
    ++rank;
  }
  residual_ = n > 0 ? residual.maxCoeff() : 0.0;
  if (n > 0 && residual.minCoeff() < -1e-6 * std::max(scale, 1e-300)) {
    throw NumericalError("pivoted Cholesky: matrix is not positive semi-definite");
  }
  factor_ = f.leftCols(rank);
}

Eigen::VectorXd PivotedCholesky::apply(const Eigen::VectorXd& eps) const {
  if (eps.size() < rank()) {
    throw DataError("not enough standard normals for the factor rank");
  }
  return factor_ * eps.head(rank());
}

} // namespace anovagp
