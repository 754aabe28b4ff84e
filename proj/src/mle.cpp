#include <algorithm>
#include <cmath>
#include <limits>

#include "anovagp/errors.hpp"
#include "anovagp/gp.hpp"
#include "anovagp/parallel.hpp"

namespace anovagp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Concentrated likelihood with per-dimension factor matrices (1 + k0_i(D, D))
// cached by length-scale, so a finite-difference step in one coordinate
// rebuilds a single factor.
class Objective {
public:
  Objective(const DesignSet& design, const Eigen::VectorXd& y, const std::vector<KernelSpec>& specs,
            const NuggetPolicy& nugget)
      : design_(design), y_(y), specs_(specs), nugget_(nugget), cache_(specs.size()) {}

  ProfileLikelihood profile(std::span<const double> theta) {
    const Eigen::Index n = y_.size();
    Eigen::MatrixXd r = factor(0, theta[0]);
    for (std::size_t d = 1; d < specs_.size(); ++d) {
      r.array() *= factor(d, theta[d]).array();
    }
    const auto chol = stabilized_cholesky(r, nugget_);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd r_ones = chol.llt.solve(ones);
    const double f0 = r_ones.dot(y_) / r_ones.sum();
    const Eigen::VectorXd resid = (y_.array() - f0).matrix();
    const double sigma2 = resid.dot(chol.llt.solve(resid)) / static_cast<double>(n);
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
      throw NumericalError("nonpositive variance estimate");
    }
    return {static_cast<double>(n) * std::log(sigma2) + chol.log_determinant(), f0, sigma2};
  }

  double operator()(std::span<const double> theta) {
    ++evaluations;
    double value = kInf;
    try {
      value = profile(theta).objective;
    } catch (const NumericalError&) {
    }
    probed.push_back(value);
    return std::isfinite(value) ? value : kInf;
  }

  int evaluations = 0;
  std::vector<double> probed;

private:
  const Eigen::MatrixXd& factor(std::size_t d, double theta) {
    auto& entries = cache_[d];
    for (const auto& [t, m] : entries) {
      if (t == theta) {
        return m;
      }
    }
    if (entries.size() >= kCacheSize) {
      entries.erase(entries.begin());
    }
    const auto& spec = specs_[d];
    const CenteredKernel k(BaseKernel(spec.kind, theta), spec.marginal, spec.centering);
    const auto x = design_.points.col(static_cast<Eigen::Index>(d));
    const Eigen::Index n = x.size();
    Eigen::VectorXd e(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      e[i] = k.embedding(x[i]);
    }
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = j; i < n; ++i) {
        m(i, j) = m(j, i) = 1.0 + k.from_embeddings(x[i], e[i], x[j], e[j]);
      }
    }
    entries.emplace_back(theta, std::move(m));
    return entries.back().second;
  }

  static constexpr std::size_t kCacheSize = 4;

  const DesignSet& design_;
  const Eigen::VectorXd& y_;
  const std::vector<KernelSpec>& specs_;
  NuggetPolicy nugget_;
  std::vector<std::vector<std::pair<double, Eigen::MatrixXd>>> cache_;
};

struct Candidate {
  double objective = kInf;
  Eigen::VectorXd z; // log theta over free dimensions

  bool better_than(const Candidate& other) const {
    if (objective != other.objective) {
      return objective < other.objective;
    }
    return z.norm() < other.z.norm();
  }
};

struct SearchSpace {
  std::vector<int> free;
  std::vector<double> theta; // full vector; free entries overwritten
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  std::vector<double> full(const Eigen::VectorXd& z) const {
    auto out = theta;
    for (std::size_t k = 0; k < free.size(); ++k) {
      out[static_cast<std::size_t>(free[k])] = std::exp(z[static_cast<Eigen::Index>(k)]);
    }
    return out;
  }
  Eigen::VectorXd clamp(const Eigen::VectorXd& z) const { return z.cwiseMax(lower).cwiseMin(upper); }
};

// Projected BFGS on log(theta) with forward-difference gradients. Every
// evaluation is offered to `best`.
void local_search(Objective& objective, const SearchSpace& space, Eigen::VectorXd z, int max_iterations,
                  Candidate& best) {
  const Eigen::Index q = z.size();
  auto eval = [&](const Eigen::VectorXd& point) {
    const double value = objective(space.full(point));
    Candidate c{value, point};
    if (c.better_than(best)) {
      best = c;
    }
    return value;
  };
  auto gradient = [&](const Eigen::VectorXd& point, double value) {
    Eigen::VectorXd g(q);
    constexpr double h = 1e-5;
    for (Eigen::Index i = 0; i < q; ++i) {
      Eigen::VectorXd probe = point;
      const bool backward = point[i] + h > space.upper[i];
      probe[i] += backward ? -h : h;
      const double shifted = eval(probe);
      if (!std::isfinite(shifted)) {
        g[i] = 0.0;
        continue;
      }
      g[i] = backward ? (value - shifted) / h : (shifted - value) / h;
    }
    return g;
  };
  auto project = [&](const Eigen::VectorXd& point, Eigen::VectorXd d) {
    for (Eigen::Index i = 0; i < q; ++i) {
      if ((point[i] <= space.lower[i] && d[i] < 0.0) || (point[i] >= space.upper[i] && d[i] > 0.0)) {
        d[i] = 0.0;
      }
    }
    return d;
  };

  double f = eval(z);
  if (!std::isfinite(f)) {
    return;
  }
  Eigen::VectorXd g = gradient(z, f);
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(q, q);
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd d = project(z, -h_inv * g);
    if (!(g.dot(d) < 0.0)) {
      h_inv.setIdentity();
      d = project(z, -g);
    }
    if (d.norm() < 1e-10) {
      break;
    }
    // Keep single steps within a factor e^2 in any length-scale.
    double t = std::min(1.0, 2.0 / d.cwiseAbs().maxCoeff());
    Eigen::VectorXd z_new;
    double f_new = kInf;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
      z_new = space.clamp(z + t * d);
      f_new = eval(z_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * g.dot(z_new - z)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (h_inv.isIdentity()) {
        break;
      }
      h_inv.setIdentity();
      continue;
    }
    const Eigen::VectorXd s = z_new - z;
    const Eigen::VectorXd g_new = gradient(z_new, f_new);
    const Eigen::VectorXd yv = g_new - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(q, q);
      h_inv = (id - rho * s * yv.transpose()) * h_inv * (id - rho * yv * s.transpose()) +
              rho * s * s.transpose();
    }
    const bool converged =
        std::abs(f - f_new) < 1e-9 * (1.0 + std::abs(f)) && s.cwiseAbs().maxCoeff() < 1e-6;
    z = z_new;
    f = f_new;
    g = g_new;
    if (converged) {
      break;
    }
  }
}

void check_inputs(const DesignSet& design, const Eigen::VectorXd& y, const std::vector<KernelSpec>& specs) {
  if (static_cast<std::size_t>(design.dim()) != specs.size()) {
    throw ConfigError("kernel specification has " + std::to_string(specs.size()) +
                      " entries for a " + std::to_string(design.dim()) + "-dimensional design");
  }
  if (design.size() != y.size()) {
    throw DataError("design has " + std::to_string(design.size()) + " rows but " +
                    std::to_string(y.size()) + " outputs were given");
  }
  if (!y.allFinite()) {
    throw DataError("observations must be finite");
  }
}

} // namespace

ProfileLikelihood profile_likelihood(const DesignSet& design, const Eigen::VectorXd& y,
                                     const std::vector<KernelSpec>& specs,
                                     std::span<const double> theta, const NuggetPolicy& nugget) {
  check_inputs(design, y, specs);
  if (theta.size() != specs.size()) {
    throw ConfigError("number of length-scales does not match the kernel dimension");
  }
  Objective objective(design, y, specs, nugget);
  return objective.profile(theta);
}

FitResult fit_mle(const DesignSet& design, const Eigen::VectorXd& y,
                  const std::vector<KernelSpec>& specs, const MleOptions& options, Rng& rng) {
  check_inputs(design, y, specs);
  const int p = design.dim();
  if (design.size() < p + 2) {
    throw DataError("maximum likelihood needs at least p + 2 observations");
  }
  if (!(y.maxCoeff() > y.minCoeff())) {
    throw DataError("observations have zero variance");
  }
  if (options.starts < 1) {
    throw ConfigError("maximum likelihood needs at least one start");
  }
  std::vector<Bounds> bounds = options.theta_bounds;
  if (bounds.empty()) {
    if (design.bounds.size() != static_cast<std::size_t>(p)) {
      throw ConfigError("design bounds are needed for default length-scale bounds");
    }
    for (const auto& [lo, hi] : design.bounds) {
      bounds.emplace_back(1e-2 * (hi - lo), 1e2 * (hi - lo));
    }
  }
  if (bounds.size() != static_cast<std::size_t>(p)) {
    throw ConfigError("length-scale bounds do not match the design dimension");
  }

  SearchSpace space;
  space.theta.resize(static_cast<std::size_t>(p));
  std::vector<Bounds> log_bounds;
  for (int d = 0; d < p; ++d) {
    const auto& spec = specs[static_cast<std::size_t>(d)];
    if (spec.theta) {
      space.theta[static_cast<std::size_t>(d)] = *spec.theta;
      continue;
    }
    const auto [lo, hi] = bounds[static_cast<std::size_t>(d)];
    if (!(lo > 0.0) || !(hi > lo)) {
      throw ConfigError("length-scale bounds must satisfy 0 < lo < hi");
    }
    space.free.push_back(d);
    log_bounds.emplace_back(std::log(lo), std::log(hi));
  }
  const auto q = static_cast<Eigen::Index>(space.free.size());
  space.lower.resize(q);
  space.upper.resize(q);
  for (Eigen::Index k = 0; k < q; ++k) {
    space.lower[k] = log_bounds[static_cast<std::size_t>(k)].first;
    space.upper[k] = log_bounds[static_cast<std::size_t>(k)].second;
  }

  Eigen::MatrixXd starts(q == 0 ? 1 : options.starts, q);
  if (q > 0) {
    if (options.starts == 1) {
      starts.row(0) = (0.5 * (space.lower + space.upper)).transpose();
    } else {
      starts = random_lhs(options.starts, log_bounds, rng).points;
    }
  }

  struct StartResult {
    Candidate best;
    int evaluations = 0;
    std::vector<double> probed;
  };
  std::vector<StartResult> results(static_cast<std::size_t>(starts.rows()));
  parallel_for(results.size(), options.threads, [&](std::size_t s) {
    Objective objective(design, y, specs, options.nugget);
    auto& result = results[s];
    const Eigen::VectorXd z0 = starts.row(static_cast<Eigen::Index>(s)).transpose();
    if (q == 0) {
      result.best = {objective(space.full(z0)), z0};
    } else {
      local_search(objective, space, z0, options.max_iterations, result.best);
    }
    result.evaluations = objective.evaluations;
    result.probed = std::move(objective.probed);
  });

  int evaluations = 0;
  std::vector<double> probed;
  Candidate best;
  for (auto& r : results) {
    evaluations += r.evaluations;
    probed.insert(probed.end(), r.probed.begin(), r.probed.end());
    if (r.best.better_than(best)) {
      best = r.best;
    }
  }
  if (!std::isfinite(best.objective)) {
    throw NumericalError("likelihood could not be evaluated at any probed length-scale");
  }
  auto theta = space.full(best.z);
  const auto profile = profile_likelihood(design, y, specs, theta, options.nugget);
  FittedGP model(design, y, make_kernel(specs, theta, profile.sigma2), profile.f0, options.nugget);
  return FitResult{std::move(model), std::move(theta), profile.objective, evaluations,
                   std::move(probed)};
}

} // namespace anovagp
