#pragma once

#include <vector>

namespace floquet {

/// n-point Gauss-Legendre rule mapped to [a, b].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  GaussLegendre(int n, double a, double b);
};

}  // namespace floquet
