#pragma once
#include <vector>

namespace susylab {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

// Gauss-Legendre on [a, b].
Rule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Gauss-Hermite for the weight exp(-x^2/2) (probabilists'), weights sum to
// sqrt(2 pi).
Rule gauss_hermite(int n);

// Trapezoid (midpoint-free, endpoint-inclusive) rule on [-half_width, half_width]
// with step close to h; the node count is odd so that 0 is a node.
Rule trapezoid_symmetric(double half_width, double h);

// Uniform periodic rule on [0, 2 pi).
Rule periodic(int n);

}  // namespace susylab
