#include "cgdae/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace cgdae {

namespace {

// Legendre P_n and its derivative on [-1, 1] via the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double prev = 1.0;
  double cur = x;
  for (int k = 2; k <= n; ++k) {
    const double next = ((2 * k - 1) * x * cur - (k - 1) * prev) / k;
    prev = cur;
    cur = next;
  }
  const double deriv = n * (prev - x * cur) / (1.0 - x * x);
  return {cur, deriv};
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one point");

  QuadratureRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Roots of P_n in descending order, refined by Newton's method.
    double x = std::cos(M_PI * (4 * i + 3) / (4 * n + 2));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const auto [p, dp] = legendre(n, x);
    (void)p;
    rule.points[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace cgdae
