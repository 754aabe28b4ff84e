#include "anovagp/random.hpp"

namespace anovagp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return splitmix64(splitmix64(parent) ^ (index * 0xd1342543de82ef95ULL + 1));
}

double open_uniform(Rng& rng) {
  // 53 random bits mapped to cell midpoints of a 2^-53 grid.
  const auto bits = rng() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double standard_normal(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  return normal(rng);
}

Eigen::VectorXd standard_normals(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = normal(rng);
  }
  return out;
}

} // namespace anovagp
