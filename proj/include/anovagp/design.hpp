#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "anovagp/random.hpp"

namespace anovagp {

using Bounds = std::pair<double, double>;

/// Experimental design: n points (rows) inside a box.
struct DesignSet {
  Eigen::MatrixXd points;
  std::vector<Bounds> bounds;

  Eigen::Index size() const { return points.rows(); }
  int dim() const { return static_cast<int>(points.cols()); }
};

/// Throws DataError when points leave the box or two rows coincide.
void validate_design(const DesignSet& design);

double min_pairwise_distance(const Eigen::MatrixXd& points);

/// Latin hypercube with one point at the midpoint of each of the n bins
/// per axis, bins assigned by independent random permutations.
DesignSet random_lhs(Eigen::Index n, const std::vector<Bounds>& bounds, Rng& rng);

struct MaximinOptions {
  int restarts = 5;
  /// Swap proposals per restart, as a multiple of n.
  int sweeps = 2000;
  /// Exponent of the Morris-Mitchell criterion driving the swaps.
  double phi_exponent = 50.0;
};

/// Maximin Latin hypercube. The first restart starts from exactly the
/// design random_lhs would return for the same generator state; each
/// restart improves its design by coordinate swaps between two points
/// (accepted when the Morris-Mitchell phi_p criterion decreases). The design
/// with the largest minimum distance seen anywhere is returned, so it is
/// never worse than the initial random LHS.
DesignSet maximin_lhs(Eigen::Index n, const std::vector<Bounds>& bounds, const MaximinOptions& options,
                      Rng& rng);

} // namespace anovagp
