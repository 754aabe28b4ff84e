#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "anovagp/distributions.hpp"
#include "anovagp/subset.hpp"

namespace anovagp {

enum class BaseKind { Exponential, Gaussian, Matern32, Matern52 };

std::string to_string(BaseKind kind);
BaseKind parse_base_kind(const std::string& name);

/// Stationary one-dimensional correlation kernel with length-scale theta.
///   Exponential: exp(-|d| / (2 theta))
///   Gaussian:    exp(-d^2 / (2 theta^2))
///   Matern32:    (1 + sqrt(3)|d|/theta) exp(-sqrt(3)|d|/theta)
///   Matern52:    (1 + sqrt(5)|d|/theta + 5 d^2/(3 theta^2)) exp(-sqrt(5)|d|/theta)
class BaseKernel {
public:
  BaseKernel(BaseKind kind, double theta);

  BaseKind kind() const { return kind_; }
  double theta() const { return theta_; }
  /// Non-smooth at zero lag (kink or finite-order derivative jump).
  bool rough() const { return kind_ != BaseKind::Gaussian; }

  double operator()(double x, double y) const;

private:
  BaseKind kind_;
  double theta_;
};

struct Centering {
  enum class Mode { ClosedForm, Quadrature };
  Mode mode = Mode::ClosedForm;
  int nodes = 256;

  static Centering closed_form() { return {Mode::ClosedForm, 0}; }
  static Centering quadrature(int nodes = 256) { return {Mode::Quadrature, nodes}; }
};

/// Base kernel centered against a marginal density:
///   k0(x, y) = k(x, y) - E(x) E(y) / B,
///   E(x) = int k(x, w) p(w) dw,   B = int int k(w, v) p(w) p(v) dw dv,
/// so that int k0(x, y) p(x) dx = 0 for every y.
///
/// Closed forms exist for Exponential and Gaussian bases with a uniform
/// marginal; every other pairing uses Gauss-Legendre quadrature over the
/// marginal's integration breaks (split at x for rough kernels).
class CenteredKernel {
public:
  CenteredKernel(BaseKernel base, Marginal marginal, Centering centering);

  const BaseKernel& base() const { return base_; }
  const Marginal& marginal() const { return marginal_; }
  const Centering& centering() const { return centering_; }

  /// E(x) = int k(x, w) p(w) dw.
  double embedding(double x) const;
  /// B = int int k(w, v) p(w) p(v) dw dv.
  double normalizer() const { return normalizer_; }

  double operator()(double x, double y) const {
    return from_embeddings(x, embedding(x), y, embedding(y));
  }
  /// k0(x, y) given precomputed embeddings E(x), E(y).
  double from_embeddings(double x, double ex, double y, double ey) const {
    return base_(x, y) - ex * ey / normalizer_;
  }

  CenteredKernel with_theta(double theta) const;

private:
  double quadrature_embedding(double x) const;

  BaseKernel base_;
  Marginal marginal_;
  Centering centering_;
  double normalizer_ = 1.0;
};

/// Points together with their per-dimension kernel embeddings, so that
/// Gram blocks can be assembled without repeating the centering integrals.
struct EmbeddedPoints {
  Eigen::MatrixXd points;     // N x p
  Eigen::MatrixXd embeddings; // N x p
  Eigen::Index size() const { return points.rows(); }
};

/// k(x, y) = sigma2 * prod_i (1 + k0_i(x_i, y_i)).
class AnovaKernel {
public:
  AnovaKernel(double sigma2, std::vector<CenteredKernel> components);

  int dim() const { return static_cast<int>(components_.size()); }
  double sigma2() const { return sigma2_; }
  const std::vector<CenteredKernel>& components() const { return components_; }
  const CenteredKernel& component(int i) const { return components_.at(i); }
  AnovaKernel with_sigma2(double sigma2) const { return AnovaKernel(sigma2, components_); }

  double operator()(std::span<const double> x, std::span<const double> y) const;

  /// sigma2 * prod_{i in u} k0_i(x_i, y_i); x_u, y_u hold the |u| coordinates
  /// of u in increasing index order.
  double subset(const Subset& u, std::span<const double> x_u, std::span<const double> y_u) const;

  EmbeddedPoints embed(const Eigen::MatrixXd& points) const;

  /// k0_d(a_i, b_j) for all i, j.
  Eigen::MatrixXd centered_gram(int d, const EmbeddedPoints& a, const EmbeddedPoints& b) const;
  double centered(int d, const EmbeddedPoints& a, Eigen::Index i, const EmbeddedPoints& b,
                  Eigen::Index j) const {
    return components_[d].from_embeddings(a.points(i, d), a.embeddings(i, d), b.points(j, d),
                                          b.embeddings(j, d));
  }

  /// Full kernel matrix k(a_i, b_j).
  Eigen::MatrixXd gram(const EmbeddedPoints& a, const EmbeddedPoints& b) const;
  /// sigma2 * prod_{i in u} k0_i(a, b) (elementwise).
  Eigen::MatrixXd subset_gram(const Subset& u, const EmbeddedPoints& a,
                              const EmbeddedPoints& b) const;

private:
  double sigma2_;
  std::vector<CenteredKernel> components_;
};

} // namespace anovagp
