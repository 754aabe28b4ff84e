#include "anovagp/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "anovagp/errors.hpp"
#include "anovagp/parallel.hpp"
#include "anovagp/random.hpp"

namespace anovagp {

namespace {

void check_pair(const Eigen::VectorXd& f_u, const Eigen::VectorXd& f_uc) {
  if (f_u.size() != f_uc.size()) {
    throw DataError("component vectors have different lengths");
  }
  if (f_u.size() < 2) {
    throw DataError("index estimation needs at least 2 sample points");
  }
}

void check_options(const EstimationOptions& options) {
  if (options.m < 2) {
    throw ConfigError("Monte-Carlo sample size must be at least 2");
  }
  if (options.realizations < 1) {
    throw ConfigError("number of realizations must be positive");
  }
  if (options.perturbations < 1) {
    throw ConfigError("number of perturbations must be positive");
  }
}

void perturb(IndexDistribution& dist, std::size_t r, const IndexRealization& rz, int k) {
  Rng rng(derive_seed(rz.seed, 1));
  const double sd = std::sqrt(rz.delta_variance / static_cast<double>(rz.m));
  for (int j = 0; j < k; ++j) {
    dist.perturbed(static_cast<Eigen::Index>(r), j) = rz.value + sd * standard_normal(rng);
  }
}

IndexRealization evaluate(const Eigen::VectorXd& f_u, const Eigen::VectorXd& f_uc, const Subset& u,
                          std::uint64_t seed) {
  auto out = plugin_index(f_u, f_uc);
  out.delta_variance = delta_variance(f_u, f_uc);
  out.u = u;
  out.seed = seed;
  return out;
}

IndexSummary summary_of(std::span<const double> pool, const IndexDistribution& dist) {
  if (pool.empty()) {
    throw DataError("cannot summarize an empty distribution");
  }
  IndexSummary s;
  s.mode = kde_mode(pool);
  double total = 0.0;
  for (double v : pool) {
    total += v;
  }
  s.mean = total / static_cast<double>(pool.size());
  s.q025 = quantile(pool, 0.025);
  s.q975 = quantile(pool, 0.975);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : dist.realizations) {
    const double gap = std::abs(r.value - s.mode);
    if (gap < best) {
      best = gap;
      s.variance_part = r.variance_part;
      s.covariance_part = r.covariance_part;
    }
  }
  return s;
}

} // namespace

IndexRealization plugin_index(const Eigen::VectorXd& f_u, const Eigen::VectorXd& f_uc) {
  check_pair(f_u, f_uc);
  const Eigen::ArrayXd cu = f_u.array() - f_u.mean();
  const Eigen::ArrayXd cc = f_uc.array() - f_uc.mean();
  const Eigen::ArrayXd cf = cu + cc;
  const double vf = cf.square().mean();
  if (!(vf > 0.0)) {
    throw NumericalError("degenerate realization: zero sample variance of f");
  }
  IndexRealization out;
  out.m = f_u.size();
  out.variance_part = cu.square().mean() / vf;
  out.covariance_part = (cu * cc).mean() / vf;
  out.value = out.variance_part + out.covariance_part;
  return out;
}

IndexRealization index_from_realization(const ComponentRealization& realization) {
  auto out = plugin_index(realization.f_u, realization.f_uc);
  out.u = realization.u;
  out.seed = realization.seed;
  return out;
}

double index_functional(const Vector6d& u) {
  return (u[3] - u[0] * u[0] + u[5] - u[0] * u[1]) / (u[4] - u[2] * u[2]);
}

Vector6d index_gradient(const Vector6d& u) {
  const double num = u[3] - u[0] * u[0] + u[5] - u[0] * u[1];
  const double den = u[4] - u[2] * u[2];
  if (!(den > 0.0)) {
    throw NumericalError("degenerate realization: zero sample variance of f");
  }
  Vector6d g;
  g << (-2.0 * u[0] - u[1]) / den, -u[0] / den, 2.0 * num * u[2] / (den * den), 1.0 / den,
      -num / (den * den), 1.0 / den;
  return g;
}

Vector6d index_moments(const Eigen::VectorXd& f_u, const Eigen::VectorXd& f_uc) {
  check_pair(f_u, f_uc);
  const Eigen::ArrayXd f = f_u.array() + f_uc.array();
  Vector6d mu;
  mu << f_u.mean(), f_uc.mean(), f.mean(), f_u.array().square().mean(), f.square().mean(),
      (f_u.array() * f_uc.array()).mean();
  return mu;
}

double delta_variance(const Eigen::VectorXd& f_u, const Eigen::VectorXd& f_uc) {
  check_pair(f_u, f_uc);
  // Shift by the sample means: phi and the variance of its linearization are
  // invariant under translation of f_u and f_uc, and centering keeps the
  // second moments well conditioned.
  const Eigen::ArrayXd a = f_u.array() - f_u.mean();
  const Eigen::ArrayXd b = f_uc.array() - f_uc.mean();
  const Eigen::ArrayXd f = a + b;
  Vector6d mu;
  mu << 0.0, 0.0, 0.0, a.square().mean(), f.square().mean(), (a * b).mean();
  const Vector6d g = index_gradient(mu);
  // Projection of U - mean onto the gradient, row by row.
  const Eigen::ArrayXd lin = g[0] * a + g[1] * b + g[2] * f + g[3] * (a.square() - mu[3]) +
                             g[4] * (f.square() - mu[4]) + g[5] * (a * b - mu[5]);
  return lin.square().mean();
}

double delta_variance(const ComponentRealization& realization) {
  return delta_variance(realization.f_u, realization.f_uc);
}

Eigen::VectorXd IndexDistribution::values() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(realizations.size()));
  for (std::size_t r = 0; r < realizations.size(); ++r) {
    out[static_cast<Eigen::Index>(r)] = realizations[r].value;
  }
  return out;
}

IndexDistribution estimate_index(const FittedGP& model, const Subset& u, const JointDistribution& joint,
                                 const EstimationOptions& options, std::uint64_t seed) {
  check_options(options);
  if (joint.dim() != model.dim()) {
    throw ConfigError("input distribution dimension does not match the model");
  }
  require_valid(u, model.dim());
  if (!options.redraw_sample) {
    Rng rng(derive_seed(seed, 0));
    return estimate_index(model, u, joint.sample(options.m, rng), options, seed);
  }
  IndexDistribution dist;
  dist.u = u;
  dist.realizations.resize(static_cast<std::size_t>(options.realizations));
  dist.perturbed.resize(options.realizations, options.perturbations);
  parallel_for(dist.realizations.size(), options.threads, [&](std::size_t r) {
    const std::uint64_t rseed = derive_seed(seed, r + 1);
    Rng rng(derive_seed(rseed, 2));
    const ComponentSampler sampler(model, u, joint.sample(options.m, rng), options.sampler);
    const auto path = sampler.draw(rseed);
    dist.realizations[r] = evaluate(path.f_u, path.f_uc, u, rseed);
    perturb(dist, r, dist.realizations[r], options.perturbations);
  });
  return dist;
}

IndexDistribution estimate_index(const FittedGP& model, const Subset& u, const Eigen::MatrixXd& T,
                                 const EstimationOptions& options, std::uint64_t seed) {
  check_options(options);
  if (options.redraw_sample) {
    throw ConfigError("a fixed Monte-Carlo sample cannot be redrawn");
  }
  const ComponentSampler sampler(model, u, T, options.sampler);
  IndexDistribution dist;
  dist.u = u;
  dist.realizations.resize(static_cast<std::size_t>(options.realizations));
  dist.perturbed.resize(options.realizations, options.perturbations);
  parallel_for(dist.realizations.size(), options.threads, [&](std::size_t r) {
    const std::uint64_t rseed = derive_seed(seed, r + 1);
    const auto path = sampler.draw(rseed);
    dist.realizations[r] = evaluate(path.f_u, path.f_uc, u, rseed);
    perturb(dist, r, dist.realizations[r], options.perturbations);
  });
  return dist;
}

std::vector<IndexDistribution> estimate_all_indices_consistent(const FittedGP& model,
                                                               const JointDistribution& joint,
                                                               const EstimationOptions& options,
                                                               std::uint64_t seed) {
  check_options(options);
  if (joint.dim() != model.dim()) {
    throw ConfigError("input distribution dimension does not match the model");
  }
  if (options.redraw_sample) {
    throw ConfigError("consistent estimation uses a single Monte-Carlo sample");
  }
  Rng rng(derive_seed(seed, 0));
  return estimate_all_indices_consistent(model, joint.sample(options.m, rng), options, seed);
}

std::vector<IndexDistribution> estimate_all_indices_consistent(const FittedGP& model,
                                                               const Eigen::MatrixXd& T,
                                                               const EstimationOptions& options,
                                                               std::uint64_t seed) {
  check_options(options);
  if (model.dim() > 4) {
    throw ConfigError("consistent estimation of all indices is limited to p <= 4 (got p = " +
                      std::to_string(model.dim()) + ")");
  }
  const FullDecompositionSampler sampler(model, T, options.sampler);
  const auto& subsets = sampler.subsets();
  std::vector<IndexDistribution> out(subsets.size());
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    out[k].u = subsets[k];
    out[k].realizations.resize(static_cast<std::size_t>(options.realizations));
    out[k].perturbed.resize(options.realizations, options.perturbations);
  }
  parallel_for(static_cast<std::size_t>(options.realizations), options.threads, [&](std::size_t r) {
    const std::uint64_t rseed = derive_seed(seed, r + 1);
    const auto draw = sampler.draw(rseed);
    for (std::size_t k = 0; k < subsets.size(); ++k) {
      const Eigen::VectorXd& f_u = draw.components[k];
      const Eigen::VectorXd f_uc = draw.f - f_u;
      // Perturbation streams differ per subset.
      out[k].realizations[r] = evaluate(f_u, f_uc, subsets[k], derive_seed(rseed, 16 + k));
      perturb(out[k], r, out[k].realizations[r], options.perturbations);
      out[k].realizations[r].seed = rseed;
    }
  });
  return out;
}

double kde_mode(std::span<const double> values) {
  if (values.empty()) {
    throw DataError("mode of an empty sample");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  if (!(hi > lo)) {
    return lo;
  }
  const auto n = static_cast<double>(sorted.size());
  double mean = 0.0;
  for (double v : sorted) {
    mean += v;
  }
  mean /= n;
  double ss = 0.0;
  for (double v : sorted) {
    ss += (v - mean) * (v - mean);
  }
  const double sd = std::sqrt(ss / (n - 1.0));
  const double h = 1.06 * sd * std::pow(n, -0.2);
  constexpr int grid = 1024;
  const double start = lo - 3.0 * h;
  const double step = (hi - lo + 6.0 * h) / (grid - 1);
  double best_x = start;
  double best_density = -1.0;
  for (int g = 0; g < grid; ++g) {
    const double x = start + step * g;
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), x - 8.0 * h);
    const auto last = std::upper_bound(first, sorted.end(), x + 8.0 * h);
    double density = 0.0;
    for (auto it = first; it != last; ++it) {
      const double z = (x - *it) / h;
      density += std::exp(-0.5 * z * z);
    }
    if (density > best_density) {
      best_density = density;
      best_x = x;
    }
  }
  return best_x;
}

double quantile(std::span<const double> values, double prob) {
  if (values.empty()) {
    throw DataError("quantile of an empty sample");
  }
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw ConfigError("quantile probability must lie in [0, 1]");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto below = static_cast<std::size_t>(std::floor(pos));
  const std::size_t above = std::min(below + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(below);
  return sorted[below] + frac * (sorted[above] - sorted[below]);
}

IndexSummary summarize(const IndexDistribution& dist) {
  const std::span<const double> pool(dist.perturbed.data(),
                                     static_cast<std::size_t>(dist.perturbed.size()));
  return summary_of(pool, dist);
}

IndexSummary summarize_realizations(const IndexDistribution& dist) {
  const Eigen::VectorXd v = dist.values();
  return summary_of(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), dist);
}

} // namespace anovagp
