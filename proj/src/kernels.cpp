#include "anovagp/kernels.hpp"

#include <cmath>
#include <numbers>

#include "anovagp/errors.hpp"
#include "anovagp/quadrature.hpp"

namespace anovagp {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.23606797749979;

// int_a^b exp(-|x - w| / c) dw, for any real x.
double exponential_interval_integral(double x, double a, double b, double c) {
  double total = 0.0;
  if (x > a) {
    const double upper = std::min(x, b);
    total += c * (std::exp(-(x - upper) / c) - std::exp(-(x - a) / c));
  }
  if (x < b) {
    const double lower = std::max(x, a);
    total += c * (std::exp(-(lower - x) / c) - std::exp(-(b - x) / c));
  }
  return total;
}

} // namespace

std::string to_string(BaseKind kind) {
  switch (kind) {
  case BaseKind::Exponential:
    return "exponential";
  case BaseKind::Gaussian:
    return "gaussian";
  case BaseKind::Matern32:
    return "matern32";
  case BaseKind::Matern52:
    return "matern52";
  }
  return "unknown";
}

BaseKind parse_base_kind(const std::string& name) {
  if (name == "exponential") {
    return BaseKind::Exponential;
  }
  if (name == "gaussian") {
    return BaseKind::Gaussian;
  }
  if (name == "matern32") {
    return BaseKind::Matern32;
  }
  if (name == "matern52") {
    return BaseKind::Matern52;
  }
  throw ConfigError("unknown kernel kind '" + name + "'");
}

BaseKernel::BaseKernel(BaseKind kind, double theta) : kind_(kind), theta_(theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw ConfigError("kernel length-scale theta must be positive and finite");
  }
}

double BaseKernel::operator()(double x, double y) const {
  const double d = std::abs(x - y);
  switch (kind_) {
  case BaseKind::Exponential:
    return std::exp(-0.5 * d / theta_);
  case BaseKind::Gaussian: {
    const double r = d / theta_;
    return std::exp(-0.5 * r * r);
  }
  case BaseKind::Matern32: {
    const double r = kSqrt3 * d / theta_;
    return (1.0 + r) * std::exp(-r);
  }
  case BaseKind::Matern52: {
    const double r = kSqrt5 * d / theta_;
    return (1.0 + r + r * r / 3.0) * std::exp(-r);
  }
  }
  return 0.0;
}

CenteredKernel::CenteredKernel(BaseKernel base, Marginal marginal, Centering centering)
    : base_(base), marginal_(std::move(marginal)), centering_(centering) {
  if (centering_.mode == Centering::Mode::ClosedForm) {
    if (!marginal_.is_uniform()) {
      throw ConfigError("closed-form centering requires a uniform marginal, got " +
                        marginal_.describe());
    }
    if (base_.kind() != BaseKind::Exponential && base_.kind() != BaseKind::Gaussian) {
      throw ConfigError("closed-form centering is available for exponential and gaussian "
                        "kernels only; use quadrature for " +
                        to_string(base_.kind()));
    }
    const auto [a, b] = marginal_.support();
    const double width = b - a;
    const double theta = base_.theta();
    if (base_.kind() == BaseKind::Exponential) {
      const double c = 2.0 * theta;
      normalizer_ = 2.0 * c * (width + c * std::expm1(-width / c)) / (width * width);
    } else {
      const double r = width / theta;
      normalizer_ = (2.0 * theta * theta * std::expm1(-0.5 * r * r) +
                     theta * std::sqrt(2.0 * std::numbers::pi) * width *
                         std::erf(r / std::numbers::sqrt2)) /
                    (width * width);
    }
  } else {
    if (centering_.nodes < 2) {
      throw ConfigError("quadrature centering needs at least 2 nodes");
    }
    const auto& breaks = marginal_.integration_breaks();
    normalizer_ = integrate_piecewise(
        [this](double x) { return quadrature_embedding(x) * marginal_.pdf(x); }, breaks,
        centering_.nodes);
  }
  if (!(normalizer_ > 1e-12)) {
    throw ConfigError("degenerate centered kernel: double integral below 1e-12 for " +
                      to_string(base_.kind()) + " with " + marginal_.describe());
  }
}

double CenteredKernel::quadrature_embedding(double x) const {
  const auto& breaks = marginal_.integration_breaks();
  auto integrand = [this, x](double w) { return base_(x, w) * marginal_.pdf(w); };
  if (base_.rough()) {
    const auto pieces = split_at(breaks, x);
    return integrate_piecewise(integrand, pieces, centering_.nodes);
  }
  return integrate_piecewise(integrand, breaks, centering_.nodes);
}

double CenteredKernel::embedding(double x) const {
  if (centering_.mode == Centering::Mode::Quadrature) {
    return quadrature_embedding(x);
  }
  const auto [a, b] = marginal_.support();
  const double width = b - a;
  const double theta = base_.theta();
  if (base_.kind() == BaseKind::Exponential) {
    return exponential_interval_integral(x, a, b, 2.0 * theta) / width;
  }
  const double s = theta * std::numbers::sqrt2;
  return std::sqrt(0.5 * std::numbers::pi) * theta *
         (std::erf((b - x) / s) - std::erf((a - x) / s)) / width;
}

CenteredKernel CenteredKernel::with_theta(double theta) const {
  return CenteredKernel(BaseKernel(base_.kind(), theta), marginal_, centering_);
}

AnovaKernel::AnovaKernel(double sigma2, std::vector<CenteredKernel> components)
    : sigma2_(sigma2), components_(std::move(components)) {
  if (!(sigma2_ >= 0.0) || !std::isfinite(sigma2_)) {
    throw ConfigError("sigma2 must be nonnegative and finite");
  }
  if (components_.empty()) {
    throw ConfigError("ANOVA kernel needs at least one component");
  }
}

double AnovaKernel::operator()(std::span<const double> x, std::span<const double> y) const {
  if (x.size() != components_.size() || y.size() != components_.size()) {
    throw DataError("point dimension does not match kernel dimension");
  }
  double product = sigma2_;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    product *= 1.0 + components_[i](x[i], y[i]);
  }
  return product;
}

double AnovaKernel::subset(const Subset& u, std::span<const double> x_u,
                           std::span<const double> y_u) const {
  require_valid(u, dim());
  const auto indices = u.indices();
  if (x_u.size() != indices.size() || y_u.size() != indices.size()) {
    throw DataError("subset coordinates do not match subset size");
  }
  double product = sigma2_;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    product *= components_[indices[k]](x_u[k], y_u[k]);
  }
  return product;
}

EmbeddedPoints AnovaKernel::embed(const Eigen::MatrixXd& points) const {
  if (points.cols() != dim()) {
    throw DataError("point matrix has " + std::to_string(points.cols()) +
                    " columns, kernel expects " + std::to_string(dim()));
  }
  EmbeddedPoints out{points, Eigen::MatrixXd(points.rows(), points.cols())};
  for (int d = 0; d < dim(); ++d) {
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      out.embeddings(i, d) = components_[d].embedding(points(i, d));
    }
  }
  return out;
}

Eigen::MatrixXd AnovaKernel::centered_gram(int d, const EmbeddedPoints& a,
                                           const EmbeddedPoints& b) const {
  Eigen::MatrixXd out(a.size(), b.size());
  const auto& k = components_.at(d);
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    const double y = b.points(j, d);
    const double ey = b.embeddings(j, d);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      out(i, j) = k.from_embeddings(a.points(i, d), a.embeddings(i, d), y, ey);
    }
  }
  return out;
}

Eigen::MatrixXd AnovaKernel::gram(const EmbeddedPoints& a, const EmbeddedPoints& b) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(a.size(), b.size(), sigma2_);
  for (int d = 0; d < dim(); ++d) {
    out.array() *= 1.0 + centered_gram(d, a, b).array();
  }
  return out;
}

Eigen::MatrixXd AnovaKernel::subset_gram(const Subset& u, const EmbeddedPoints& a,
                                         const EmbeddedPoints& b) const {
  require_valid(u, dim());
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(a.size(), b.size(), sigma2_);
  for (int d : u.indices()) {
    out.array() *= centered_gram(d, a, b).array();
  }
  return out;
}

} // namespace anovagp
