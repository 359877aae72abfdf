#include "susylab/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "susylab/errors.hpp"

namespace susylab {

Rule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw InvalidInput("gauss_legendre: n < 1");
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    if (n == 1) {
      x = 0.0;
      dp = 1.0;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = mid - half * x;
    r.nodes[n - 1 - i] = mid + half * x;
    r.weights[i] = r.weights[n - 1 - i] = half * w;
  }
  return r;
}

Rule gauss_hermite(int n) {
  if (n < 1) throw InvalidInput("gauss_hermite: n < 1");
  // physicists' roots by Newton on orthonormal Hermite functions, then
  // rescaled to weight exp(-x^2/2)
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  double z = 0.0;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * r.nodes[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * r.nodes[1];
    else
      z = 2.0 * z - r.nodes[i - 2];
    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    r.nodes[i] = z;
    r.nodes[n - 1 - i] = -z;
    r.weights[i] = r.weights[n - 1 - i] = 2.0 / (pp * pp);
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  const double s2 = std::numbers::sqrt2;
  for (int i = 0; i < n; ++i) {
    r.nodes[i] *= s2;
    r.weights[i] *= s2;
  }
  return r;
}

Rule trapezoid_symmetric(double half_width, double h) {
  if (!(half_width > 0.0) || !(h > 0.0)) throw InvalidInput("trapezoid_symmetric: bad extent");
  const int m = static_cast<int>(std::ceil(half_width / h));
  const double step = half_width / m;
  Rule r;
  for (int k = -m; k <= m; ++k) {
    r.nodes.push_back(k * step);
    r.weights.push_back((k == -m || k == m) ? 0.5 * step : step);
  }
  return r;
}

Rule periodic(int n) {
  if (n < 1) throw InvalidInput("periodic: n < 1");
  Rule r;
  const double h = 2.0 * std::numbers::pi / n;
  for (int k = 0; k < n; ++k) {
    r.nodes.push_back(k * h);
    r.weights.push_back(h);
  }
  return r;
}

}  // namespace susylab
