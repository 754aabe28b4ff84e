#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace anovagp {

using Rng = std::mt19937_64;

/// Child seed for stream `index` of `parent`. All parallel or repeated work
/// derives its seed through this function so that results depend only on
/// the master seed, never on scheduling.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

/// Uniform draw in the open interval (0, 1); never returns 0 or 1.
double open_uniform(Rng& rng);

double standard_normal(Rng& rng);

Eigen::VectorXd standard_normals(Rng& rng, Eigen::Index n);

} // namespace anovagp
