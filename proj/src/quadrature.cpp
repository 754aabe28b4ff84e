#include "anovagp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "anovagp/errors.hpp"

namespace anovagp {

namespace {

QuadratureRule build_rule(int n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration on P_n from the Tricomi initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      derivative = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / derivative;
      x -= step;
      if (std::abs(step) < 1e-16) {
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    rule.nodes[n / 2] = 0.0;
  }
  return rule;
}

} // namespace

const QuadratureRule& gauss_legendre(int n) {
  if (n < 1 || n > 4096) {
    throw ConfigError("quadrature node count must be in [1, 4096]");
  }
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<QuadratureRule>(build_rule(n));
  }
  return *slot;
}

std::vector<double> split_at(std::span<const double> breaks, double x) {
  std::vector<double> out(breaks.begin(), breaks.end());
  if (out.size() >= 2 && x > out.front() && x < out.back()) {
    auto it = std::lower_bound(out.begin(), out.end(), x);
    if (*it != x) {
      out.insert(it, x);
    }
  }
  return out;
}

} // namespace anovagp
