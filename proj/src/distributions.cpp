#include "anovagp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "anovagp/errors.hpp"
#include "anovagp/quadrature.hpp"

namespace anovagp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kOneMinusUlp = 1.0 - 0x1.0p-53;

double clamp_open(double u) {
  return std::clamp(u, std::numeric_limits<double>::min(), kOneMinusUlp);
}

// Acklam's rational approximation, refined by one Halley step.
double acklam_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;
  double x;
  if (p < low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  for (int iter = 0; iter < 2; ++iter) {
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double gumbel_cdf(double x, double loc, double scale) {
  if (std::isinf(x)) {
    return x > 0 ? 1.0 : 0.0;
  }
  return std::exp(-std::exp(-(x - loc) / scale));
}

void require(bool condition, const std::string& message) {
  if (!condition) {
    throw ConfigError(message);
  }
}

std::vector<double> dedupe(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

} // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ConfigError("normal quantile requires 0 < p < 1");
  }
  if (p > 0.5) {
    return -acklam_quantile(1.0 - p);
  }
  return acklam_quantile(p);
}

Marginal::Marginal(Params params) : params_(params) {
  std::visit(
      [this](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          require(std::isfinite(m.a) && std::isfinite(m.b) && m.a < m.b, "uniform requires a < b");
          breaks_ = {m.a, m.b};
        } else if constexpr (std::is_same_v<T, Triangular>) {
          require(std::isfinite(m.a) && std::isfinite(m.b) && m.a < m.b && m.a <= m.c && m.c <= m.b,
                  "triangular requires a <= c <= b and a < b");
          breaks_ = dedupe({m.a, m.c, m.b});
        } else if constexpr (std::is_same_v<T, TruncatedNormal>) {
          require(m.sd > 0.0 && m.lo < m.hi && std::isfinite(m.mean),
                  "truncated normal requires sd > 0 and lo < hi");
          const double alpha = (m.lo - m.mean) / m.sd;
          const double beta = (m.hi - m.mean) / m.sd;
          lower_mass_ = normal_cdf(alpha);
          upper_mass_ = normal_cdf(beta);
          lower_tail_ = normal_sf(alpha);
          upper_tail_ = normal_sf(beta);
          require(upper_mass_ - lower_mass_ > 1e-300 || lower_tail_ - upper_tail_ > 1e-300,
                  "truncated normal interval carries no mass");
          breaks_ = {std::max(m.lo, m.mean - 10.0 * m.sd), std::min(m.hi, m.mean + 10.0 * m.sd)};
          require(breaks_[0] < breaks_[1], "truncated normal interval lies in a negligible tail");
        } else {
          require(m.scale > 0.0 && m.lo < m.hi && std::isfinite(m.loc),
                  "truncated Gumbel requires scale > 0 and lo < hi");
          lower_mass_ = gumbel_cdf(m.lo, m.loc, m.scale);
          upper_mass_ = gumbel_cdf(m.hi, m.loc, m.scale);
          require(upper_mass_ > lower_mass_, "truncated Gumbel interval carries no mass");
          breaks_ = {std::max(m.lo, m.loc - 5.0 * m.scale), std::min(m.hi, m.loc + 40.0 * m.scale)};
          require(breaks_[0] < breaks_[1], "truncated Gumbel interval lies in a negligible tail");
        }
      },
      params_);
}

std::string Marginal::describe() const {
  std::ostringstream out;
  std::visit(
      [&out](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          out << "Uniform(" << m.a << ", " << m.b << ")";
        } else if constexpr (std::is_same_v<T, Triangular>) {
          out << "Triangular(" << m.a << ", " << m.c << ", " << m.b << ")";
        } else if constexpr (std::is_same_v<T, TruncatedNormal>) {
          out << "TruncatedNormal(" << m.mean << ", " << m.sd << ", [" << m.lo << ", " << m.hi << "])";
        } else {
          out << "TruncatedGumbel(" << m.loc << ", " << m.scale << ", [" << m.lo << ", " << m.hi
              << "])";
        }
      },
      params_);
  return out.str();
}

std::pair<double, double> Marginal::support() const {
  return std::visit(
      [](const auto& m) -> std::pair<double, double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Uniform> || std::is_same_v<T, Triangular>) {
          return {m.a, m.b};
        } else {
          return {m.lo, m.hi};
        }
      },
      params_);
}

double Marginal::pdf(double x) const {
  return std::visit(
      [this, x](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return (x < m.a || x > m.b) ? 0.0 : 1.0 / (m.b - m.a);
        } else if constexpr (std::is_same_v<T, Triangular>) {
          if (x < m.a || x > m.b) {
            return 0.0;
          }
          const double width = m.b - m.a;
          if (x < m.c) {
            return 2.0 * (x - m.a) / (width * (m.c - m.a));
          }
          if (x > m.c) {
            return 2.0 * (m.b - x) / (width * (m.b - m.c));
          }
          return 2.0 / width;
        } else if constexpr (std::is_same_v<T, TruncatedNormal>) {
          if (x < m.lo || x > m.hi) {
            return 0.0;
          }
          const double z = (x - m.mean) / m.sd;
          const double mass = std::max(upper_mass_ - lower_mass_, lower_tail_ - upper_tail_);
          return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * m.sd * mass);
        } else {
          if (x < m.lo || x > m.hi) {
            return 0.0;
          }
          const double z = (x - m.loc) / m.scale;
          return std::exp(-z - std::exp(-z)) / (m.scale * (upper_mass_ - lower_mass_));
        }
      },
      params_);
}

double Marginal::cdf(double x) const {
  return std::visit(
      [this, x](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return std::clamp((x - m.a) / (m.b - m.a), 0.0, 1.0);
        } else if constexpr (std::is_same_v<T, Triangular>) {
          if (x <= m.a) {
            return 0.0;
          }
          if (x >= m.b) {
            return 1.0;
          }
          const double width = m.b - m.a;
          if (x <= m.c) {
            return (x - m.a) * (x - m.a) / (width * (m.c - m.a));
          }
          return 1.0 - (m.b - x) * (m.b - x) / (width * (m.b - m.c));
        } else if constexpr (std::is_same_v<T, TruncatedNormal>) {
          if (x <= m.lo) {
            return 0.0;
          }
          if (x >= m.hi) {
            return 1.0;
          }
          const double z = (x - m.mean) / m.sd;
          if (z > 0.0) {
            return 1.0 - (normal_sf(z) - upper_tail_) / (lower_tail_ - upper_tail_);
          }
          return (normal_cdf(z) - lower_mass_) / (upper_mass_ - lower_mass_);
        } else {
          if (x <= m.lo) {
            return 0.0;
          }
          if (x >= m.hi) {
            return 1.0;
          }
          return (gumbel_cdf(x, m.loc, m.scale) - lower_mass_) / (upper_mass_ - lower_mass_);
        }
      },
      params_);
}

double Marginal::inverse_cdf(double prob) const {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw ConfigError("inverse CDF requires 0 < prob < 1");
  }
  return std::visit(
      [this, prob](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return m.a + prob * (m.b - m.a);
        } else if constexpr (std::is_same_v<T, Triangular>) {
          const double width = m.b - m.a;
          const double split = (m.c - m.a) / width;
          if (prob <= split) {
            return m.a + std::sqrt(prob * width * (m.c - m.a));
          }
          return m.b - std::sqrt((1.0 - prob) * width * (m.b - m.c));
        } else if constexpr (std::is_same_v<T, TruncatedNormal>) {
          const double u = lower_mass_ + prob * (upper_mass_ - lower_mass_);
          double x;
          if (u < 0.5) {
            x = m.mean + m.sd * normal_quantile(std::max(u, std::numeric_limits<double>::min()));
          } else {
            // Work with upper tail probabilities to keep precision near 1.
            const double s = lower_tail_ - prob * (lower_tail_ - upper_tail_);
            x = m.mean - m.sd * normal_quantile(std::max(s, std::numeric_limits<double>::min()));
          }
          return std::clamp(x, m.lo, m.hi);
        } else {
          const double u = lower_mass_ + prob * (upper_mass_ - lower_mass_);
          return std::clamp(m.loc - m.scale * std::log(-std::log(u)), m.lo, m.hi);
        }
      },
      params_);
}

JointDistribution::JointDistribution(std::vector<Marginal> marginals, Copula copula)
    : marginals_(std::move(marginals)), copula_(std::move(copula)) {
  const int p = dim();
  if (p < 1) {
    throw ConfigError("joint distribution needs at least one marginal");
  }
  auto check_index = [p](int i) {
    if (i < 0 || i >= p) {
      throw ConfigError("copula index " + std::to_string(i + 1) + " out of range");
    }
  };
  if (auto* g = std::get_if<GaussianCopula>(&copula_)) {
    const auto& c = g->correlation;
    if (c.rows() != p || c.cols() != p) {
      throw ConfigError("Gaussian copula correlation matrix must be p x p");
    }
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw ConfigError("Gaussian copula correlation matrix is not symmetric");
    }
    for (int i = 0; i < p; ++i) {
      if (std::abs(c(i, i) - 1.0) > 1e-12) {
        throw ConfigError("Gaussian copula correlation matrix needs a unit diagonal");
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
    if (eig.eigenvalues().minCoeff() < -1e-10) {
      throw ConfigError("Gaussian copula correlation matrix is not positive semi-definite");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() == Eigen::Success) {
      gaussian_factor_ = llt.matrixL();
    } else {
      gaussian_factor_ = eig.eigenvectors() *
                         eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }
  } else if (auto* cl = std::get_if<ClaytonCopula>(&copula_)) {
    std::vector<bool> used(p, false);
    for (const auto& group : cl->groups) {
      if (!(group.theta > 0.0) || !std::isfinite(group.theta)) {
        throw ConfigError("Clayton theta must be positive");
      }
      if (group.indices.size() < 2) {
        throw ConfigError("Clayton group needs at least two indices");
      }
      for (int i : group.indices) {
        check_index(i);
        if (used[i]) {
          throw ConfigError("Clayton groups must be disjoint");
        }
        used[i] = true;
      }
    }
  } else if (auto* eq = std::get_if<EqualityCopula>(&copula_)) {
    for (auto [i, j] : eq->pairs) {
      check_index(i);
      check_index(j);
      if (i == j) {
        throw ConfigError("equality pair must reference distinct indices");
      }
    }
  }
}

Eigen::MatrixXd JointDistribution::sample_uniforms(Eigen::Index m, Rng& rng) const {
  const int p = dim();
  Eigen::MatrixXd u(m, p);
  if (auto* g = std::get_if<GaussianCopula>(&copula_)) {
    (void)g;
    Eigen::MatrixXd z(m, p);
    for (Eigen::Index r = 0; r < m; ++r) {
      for (int c = 0; c < p; ++c) {
        z(r, c) = standard_normal(rng);
      }
    }
    const Eigen::MatrixXd correlated = z * gaussian_factor_.transpose();
    for (Eigen::Index r = 0; r < m; ++r) {
      for (int c = 0; c < p; ++c) {
        u(r, c) = clamp_open(normal_cdf(correlated(r, c)));
      }
    }
    return u;
  }
  for (Eigen::Index r = 0; r < m; ++r) {
    for (int c = 0; c < p; ++c) {
      u(r, c) = open_uniform(rng);
    }
    if (auto* cl = std::get_if<ClaytonCopula>(&copula_)) {
      // Marshall-Olkin: V ~ Gamma(1/theta), U_i = (1 + E_i / V)^(-1/theta).
      for (const auto& group : cl->groups) {
        std::gamma_distribution<double> frailty(1.0 / group.theta, 1.0);
        const double v = frailty(rng);
        for (int i : group.indices) {
          const double e = -std::log(open_uniform(rng));
          u(r, i) = clamp_open(std::exp(-std::log1p(e / v) / group.theta));
        }
      }
    }
  }
  if (auto* eq = std::get_if<EqualityCopula>(&copula_)) {
    for (auto [i, j] : eq->pairs) {
      u.col(j) = u.col(i);
    }
  }
  return u;
}

Eigen::MatrixXd JointDistribution::sample(Eigen::Index m, Rng& rng) const {
  Eigen::MatrixXd x = sample_uniforms(m, rng);
  for (int c = 0; c < dim(); ++c) {
    for (Eigen::Index r = 0; r < m; ++r) {
      x(r, c) = marginals_[c].inverse_cdf(x(r, c));
    }
  }
  return x;
}

double spearman_to_gaussian_param(double rho_s) {
  if (!(std::abs(rho_s) < 1.0)) {
    throw ConfigError("Spearman rho must lie in (-1, 1)");
  }
  return 2.0 * std::sin(std::numbers::pi * rho_s / 6.0);
}

double clayton_spearman(double theta, int nodes) {
  if (!(theta > 0.0)) {
    throw ConfigError("Clayton theta must be positive");
  }
  const auto& rule = gauss_legendre(nodes);
  std::vector<double> a(nodes);
  std::vector<double> w(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double x = 0.5 * (rule.nodes[i] + 1.0);
    a[i] = -theta * std::log(x);
    w[i] = 0.5 * rule.weights[i];
  }
  double integral = 0.0;
  for (int i = 0; i < nodes; ++i) {
    double row = 0.0;
    for (int j = 0; j < nodes; ++j) {
      // log(u^-theta + v^-theta - 1) without overflow or cancellation.
      const double big = std::max(a[i], a[j]);
      double log_s;
      if (big < 30.0) {
        log_s = std::log1p(std::expm1(a[i]) + std::expm1(a[j]));
      } else {
        log_s = big + std::log(std::exp(a[i] - big) + std::exp(a[j] - big) - std::exp(-big));
      }
      row += w[j] * std::exp(-log_s / theta);
    }
    integral += w[i] * row;
  }
  return 12.0 * integral - 3.0;
}

double spearman_to_clayton_param(double rho_s) {
  if (!(rho_s > 0.0 && rho_s < 1.0)) {
    throw ConfigError("Clayton copula needs Spearman rho in (0, 1)");
  }
  double lo = std::log(1e-6);
  double hi = std::log(1e3);
  if (!(clayton_spearman(std::exp(lo)) < rho_s && clayton_spearman(std::exp(hi)) > rho_s)) {
    throw NumericalError("no Clayton parameter in [1e-6, 1e3] brackets the target Spearman rho");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double value = clayton_spearman(std::exp(mid));
    if (std::abs(value - rho_s) < 1e-7 || hi - lo < 1e-12) {
      return std::exp(mid);
    }
    (value < rho_s ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

double match_pearson_gaussian(const Marginal& first, const Marginal& second, double target,
                              Eigen::Index samples, std::uint64_t seed) {
  if (!(std::abs(target) < 1.0)) {
    throw ConfigError("target Pearson correlation must lie in (-1, 1)");
  }
  Rng rng(seed);
  const Eigen::VectorXd z1 = standard_normals(rng, samples);
  const Eigen::VectorXd z2 = standard_normals(rng, samples);
  std::vector<double> x(samples);
  std::vector<double> y(samples);
  for (Eigen::Index i = 0; i < samples; ++i) {
    x[i] = first.inverse_cdf(clamp_open(normal_cdf(z1[i])));
  }
  auto correlation_at = [&](double rho) {
    const double c = std::sqrt(1.0 - rho * rho);
    for (Eigen::Index i = 0; i < samples; ++i) {
      y[i] = second.inverse_cdf(clamp_open(normal_cdf(rho * z1[i] + c * z2[i])));
    }
    return pearson_correlation(x, y);
  };
  double lo = -0.999;
  double hi = 0.999;
  if (!(correlation_at(lo) < target && correlation_at(hi) > target)) {
    throw NumericalError("target Pearson correlation is not attainable for these marginals");
  }
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double value = correlation_at(mid);
    if (std::abs(value - target) < 1e-5) {
      return mid;
    }
    (value < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DataError("correlation needs two equally sized samples of size >= 2");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

namespace {

std::vector<double> ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) {
      ++j;
    }
    const double average = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      r[order[k]] = average;
    }
    i = j + 1;
  }
  return r;
}

} // namespace

double spearman_correlation(std::span<const double> x, std::span<const double> y) {
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  return pearson_correlation(rx, ry);
}

} // namespace anovagp
