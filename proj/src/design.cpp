#include "anovagp/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "anovagp/errors.hpp"

namespace anovagp {

namespace {

void check_bounds(Eigen::Index n, const std::vector<Bounds>& bounds) {
  if (n < 2) {
    throw ConfigError("a Latin hypercube needs at least 2 points");
  }
  if (bounds.empty()) {
    throw ConfigError("design bounds are empty");
  }
  for (const auto& [lo, hi] : bounds) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw ConfigError("design bounds must be finite with lo < hi");
    }
  }
}

// Integer bin indices (n x p), one random permutation per column.
Eigen::MatrixXi random_bins(Eigen::Index n, int p, Rng& rng) {
  Eigen::MatrixXi bins(n, p);
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int c = 0; c < p; ++c) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (Eigen::Index r = 0; r < n; ++r) {
      bins(r, c) = perm[static_cast<std::size_t>(r)];
    }
  }
  return bins;
}

Eigen::MatrixXd unit_points(const Eigen::MatrixXi& bins) {
  const double n = static_cast<double>(bins.rows());
  return (bins.cast<double>().array() + 0.5) / n;
}

DesignSet scale(const Eigen::MatrixXd& unit, const std::vector<Bounds>& bounds) {
  DesignSet out{unit, bounds};
  for (Eigen::Index c = 0; c < unit.cols(); ++c) {
    const auto [lo, hi] = bounds[static_cast<std::size_t>(c)];
    out.points.col(c) = (lo + (hi - lo) * unit.col(c).array()).matrix();
  }
  return out;
}

// x^k for integer k >= 0 by repeated squaring.
double integer_power(double x, int k) {
  double out = 1.0;
  while (k > 0) {
    if (k & 1) {
      out *= x;
    }
    x *= x;
    k >>= 1;
  }
  return out;
}

// Morris-Mitchell criterion sum_{i<j} d_ij^-q on unit-cube points, with the
// pairwise terms cached so a coordinate swap is scored in O(n). Swaps are
// compared through freshly summed rows rather than a running total, which
// would lose precision when the terms span many orders of magnitude.
class PhiState {
public:
  PhiState(const Eigen::MatrixXd& points, double exponent)
      : pts_(points.transpose()), exponent_(exponent),
        half_(std::round(0.5 * exponent) == 0.5 * exponent ? static_cast<int>(0.5 * exponent) : -1),
        inv_(Eigen::MatrixXd::Zero(points.rows(), points.rows())), row_a_(points.rows()),
        row_b_(points.rows()) {
    const Eigen::Index n = points.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        inv_(i, j) = inv_(j, i) = term(i, j);
      }
    }
  }

  Eigen::MatrixXd points() const { return pts_.transpose(); }

  // Swaps coordinate c of points a and b when that lowers the criterion.
  bool try_swap(Eigen::Index a, Eigen::Index b, Eigen::Index c) {
    const double before = inv_.col(a).sum() + inv_.col(b).sum();
    std::swap(pts_(c, a), pts_(c, b));
    fill_row(a, row_a_);
    fill_row(b, row_b_);
    if (row_a_.sum() + row_b_.sum() < before) {
      inv_.col(a) = row_a_;
      inv_.row(a) = row_a_.transpose();
      inv_.col(b) = row_b_;
      inv_.row(b) = row_b_.transpose();
      return true;
    }
    std::swap(pts_(c, a), pts_(c, b));
    return false;
  }

private:
  double term(Eigen::Index i, Eigen::Index j) const {
    const double d2 = (pts_.col(i) - pts_.col(j)).squaredNorm();
    if (half_ > 0) {
      return integer_power(1.0 / d2, half_);
    }
    return std::pow(d2, -0.5 * exponent_);
  }

  void fill_row(Eigen::Index a, Eigen::VectorXd& row) const {
    for (Eigen::Index j = 0; j < pts_.cols(); ++j) {
      row[j] = j == a ? 0.0 : term(a, j);
    }
  }

  Eigen::MatrixXd pts_; // p x n
  double exponent_;
  int half_; // exponent / 2 when it is an integer
  Eigen::MatrixXd inv_;
  Eigen::VectorXd row_a_;
  Eigen::VectorXd row_b_;
};

} // namespace

void validate_design(const DesignSet& design) {
  if (static_cast<std::size_t>(design.points.cols()) != design.bounds.size()) {
    throw DataError("design bounds do not match design dimension");
  }
  for (Eigen::Index c = 0; c < design.points.cols(); ++c) {
    const auto [lo, hi] = design.bounds[static_cast<std::size_t>(c)];
    const double slack = 1e-12 * std::max(1.0, hi - lo);
    if ((design.points.col(c).array() < lo - slack).any() ||
        (design.points.col(c).array() > hi + slack).any()) {
      throw DataError("design point outside bounds in column " + std::to_string(c + 1));
    }
  }
  if (design.size() >= 2 && !(min_pairwise_distance(design.points) > 0.0)) {
    throw DataError("design contains duplicated rows");
  }
}

double min_pairwise_distance(const Eigen::MatrixXd& points) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < points.rows(); ++j) {
      best = std::min(best, (points.row(i) - points.row(j)).squaredNorm());
    }
  }
  return std::sqrt(best);
}

DesignSet random_lhs(Eigen::Index n, const std::vector<Bounds>& bounds, Rng& rng) {
  check_bounds(n, bounds);
  return scale(unit_points(random_bins(n, static_cast<int>(bounds.size()), rng)), bounds);
}

DesignSet maximin_lhs(Eigen::Index n, const std::vector<Bounds>& bounds, const MaximinOptions& options,
                      Rng& rng) {
  check_bounds(n, bounds);
  if (options.restarts < 1) {
    throw ConfigError("maximin LHS needs at least one restart");
  }
  const int p = static_cast<int>(bounds.size());
  Eigen::MatrixXd best;
  double best_distance = -1.0;
  auto consider = [&](const Eigen::MatrixXd& unit) {
    // Compare in natural units, the metric reported to callers.
    const double d = min_pairwise_distance(scale(unit, bounds).points);
    if (d > best_distance) {
      best_distance = d;
      best = unit;
    }
  };
  std::uniform_int_distribution<Eigen::Index> pick_row(0, n - 1);
  std::uniform_int_distribution<int> pick_col(0, p - 1);
  const long proposals = static_cast<long>(options.sweeps) * static_cast<long>(n);
  for (int restart = 0; restart < options.restarts; ++restart) {
    PhiState state(unit_points(random_bins(n, p, rng)), options.phi_exponent);
    consider(state.points());
    for (long it = 0; it < proposals; ++it) {
      const Eigen::Index a = pick_row(rng);
      const Eigen::Index b = pick_row(rng);
      const int c = pick_col(rng);
      if (a != b) {
        state.try_swap(a, b, c);
      }
    }
    consider(state.points());
  }
  return scale(best, bounds);
}

} // namespace anovagp
