#pragma once

#include <span>
#include <vector>

namespace anovagp {

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point Gauss-Legendre rule. Thread-safe.
const QuadratureRule& gauss_legendre(int n);

/// Integral of f over [a, b] with an n-point Gauss-Legendre rule.
template <class F>
double integrate(F&& f, double a, double b, int n) {
  const auto& rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

/// Integral over [breaks.front(), breaks.back()], one n-point rule per
/// piece. Breaks must be sorted; zero-length pieces are skipped.
template <class F>
double integrate_piecewise(F&& f, std::span<const double> breaks, int n) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] > breaks[i]) {
      sum += integrate(f, breaks[i], breaks[i + 1], n);
    }
  }
  return sum;
}

/// `breaks` with `x` inserted when it lies strictly inside the range.
std::vector<double> split_at(std::span<const double> breaks, double x);

} // namespace anovagp
