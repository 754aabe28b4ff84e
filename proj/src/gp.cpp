#include "anovagp/gp.hpp"

#include <cmath>

#include "anovagp/errors.hpp"

namespace anovagp {

AnovaKernel make_kernel(const std::vector<KernelSpec>& specs, std::span<const double> theta,
                        double sigma2) {
  if (specs.size() != theta.size()) {
    throw ConfigError("number of length-scales does not match the kernel dimension");
  }
  std::vector<CenteredKernel> components;
  components.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (!(theta[i] > 0.0) || !std::isfinite(theta[i])) {
      throw ConfigError("length-scale must be positive and finite");
    }
    components.emplace_back(BaseKernel(specs[i].kind, theta[i]), specs[i].marginal,
                            specs[i].centering);
  }
  return AnovaKernel(sigma2, std::move(components));
}

FittedGP::FittedGP(DesignSet design, Eigen::VectorXd y, AnovaKernel kernel, double f0,
                   const NuggetPolicy& policy)
    : design_(std::move(design)), y_(std::move(y)), kernel_(std::move(kernel)), f0_(f0) {
  if (design_.points.rows() != y_.size()) {
    throw DataError("design has " + std::to_string(design_.points.rows()) + " rows but " +
                    std::to_string(y_.size()) + " outputs were given");
  }
  if (design_.points.cols() != kernel_.dim()) {
    throw DataError("design dimension does not match kernel dimension");
  }
  if (!y_.allFinite() || !std::isfinite(f0_)) {
    throw DataError("observations must be finite");
  }
  design_embedding_ = kernel_.embed(design_.points);
  if (size() == 0) {
    return;
  }
  chol_ = stabilized_cholesky(kernel_.gram(design_embedding_, design_embedding_), policy);
  alpha_ = chol_.llt.solve((y_.array() - f0_).matrix());
}

void FittedGP::check_dim(Eigen::Index cols) const {
  if (cols != dim()) {
    throw DataError("point dimension " + std::to_string(cols) + " does not match model dimension " +
                    std::to_string(dim()));
  }
}

Eigen::MatrixXd FittedGP::solve(const Eigen::MatrixXd& rhs) const {
  if (size() == 0) {
    return Eigen::MatrixXd(0, rhs.cols());
  }
  return chol_.llt.solve(rhs);
}

double FittedGP::predictive_mean(std::span<const double> x) const {
  check_dim(static_cast<Eigen::Index>(x.size()));
  const Eigen::MatrixXd row = Eigen::Map<const Eigen::RowVectorXd>(x.data(), dim());
  return predictive_mean(row)(0);
}

Eigen::VectorXd FittedGP::predictive_mean(const Eigen::MatrixXd& points) const {
  check_dim(points.cols());
  if (size() == 0) {
    return Eigen::VectorXd::Constant(points.rows(), f0_);
  }
  const auto embedded = kernel_.embed(points);
  return (kernel_.gram(embedded, design_embedding_) * alpha_).array() + f0_;
}

double FittedGP::predictive_cov(std::span<const double> x, std::span<const double> y) const {
  check_dim(static_cast<Eigen::Index>(x.size()));
  check_dim(static_cast<Eigen::Index>(y.size()));
  const Eigen::MatrixXd a = Eigen::Map<const Eigen::RowVectorXd>(x.data(), dim());
  const Eigen::MatrixXd b = Eigen::Map<const Eigen::RowVectorXd>(y.data(), dim());
  return predictive_cov(a, b)(0, 0);
}

Eigen::MatrixXd FittedGP::predictive_cov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const {
  check_dim(a.cols());
  check_dim(b.cols());
  const auto ea = kernel_.embed(a);
  const auto eb = kernel_.embed(b);
  Eigen::MatrixXd cov = kernel_.gram(ea, eb);
  if (size() == 0) {
    return cov;
  }
  const Eigen::MatrixXd ka = kernel_.gram(ea, design_embedding_);
  const Eigen::MatrixXd kb = kernel_.gram(eb, design_embedding_);
  const Eigen::MatrixXd la = chol_.llt.matrixL().solve(ka.transpose());
  const Eigen::MatrixXd lb = chol_.llt.matrixL().solve(kb.transpose());
  cov.noalias() -= la.transpose() * lb;
  return cov;
}

double FittedGP::mean_constant() const {
  return f0_ + sigma2() * alpha_.sum();
}

double FittedGP::mean_component(const Subset& u, std::span<const double> x_u) const {
  require_valid(u, dim());
  const auto indices = u.indices();
  if (x_u.size() != indices.size()) {
    throw DataError("subset coordinates do not match subset size");
  }
  Eigen::VectorXd weights = Eigen::VectorXd::Constant(size(), sigma2());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto& kernel = kernel_.component(indices[k]);
    const double ex = kernel.embedding(x_u[k]);
    for (Eigen::Index j = 0; j < size(); ++j) {
      weights[j] *= kernel.from_embeddings(x_u[k], ex, design_.points(j, indices[k]),
                                           design_embedding_.embeddings(j, indices[k]));
    }
  }
  return weights.dot(alpha_);
}

Eigen::VectorXd FittedGP::mean_component(const Subset& u, const Eigen::MatrixXd& points) const {
  check_dim(points.cols());
  require_valid(u, dim());
  if (size() == 0) {
    return Eigen::VectorXd::Zero(points.rows());
  }
  const auto embedded = kernel_.embed(points);
  return kernel_.subset_gram(u, embedded, design_embedding_) * alpha_;
}

namespace {

double sample_variance(const Eigen::VectorXd& v) {
  return (v.array() - v.mean()).square().mean();
}

} // namespace

double q2_score(const FittedGP& model, const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs) {
  if (inputs.rows() != outputs.size()) {
    throw DataError("test inputs and outputs have different lengths");
  }
  if (outputs.size() < 2) {
    throw DataError("Q2 needs at least 2 test points");
  }
  const double total = (outputs.array() - outputs.mean()).square().sum();
  if (!(total > 0.0)) {
    throw DataError("test outputs have zero variance");
  }
  const Eigen::VectorXd mu = model.predictive_mean(inputs);
  return 1.0 - (outputs - mu).squaredNorm() / total;
}

double durrande_index(const FittedGP& model, const Subset& u, const Eigen::MatrixXd& sample) {
  if (sample.rows() < 100) {
    throw ConfigError("predictive-mean index needs at least 100 sample points");
  }
  const double total = sample_variance(model.predictive_mean(sample));
  if (!(total > 0.0)) {
    throw NumericalError("predictive mean has zero variance on the sample");
  }
  return sample_variance(model.mean_component(u, sample)) / total;
}

} // namespace anovagp
