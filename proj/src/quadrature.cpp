#include "floquet/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "floquet/errors.hpp"

namespace floquet {

GaussLegendre::GaussLegendre(int n, double a, double b) {
  if (n < 1) throw ValidationError("Gauss-Legendre rule needs at least one node");
  nodes.resize(static_cast<std::size_t>(n));
  weights.resize(nodes.size());
  const double mid = 0.5 * (b + a);
  const double half = 0.5 * (b - a);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi's initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    nodes[lo] = mid - half * x;
    nodes[hi] = mid + half * x;
    weights[lo] = weights[hi] = half * w;
  }
}

}  // namespace floquet
