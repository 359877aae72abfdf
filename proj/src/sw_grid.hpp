#pragma once
// Shared boost/P sweep for the one-site p = q = 1 Schafer-Wegner integrals.
#include <array>
#include <cmath>

#include "susylab/quadrature.hpp"
#include "susylab/sw.hpp"

namespace susylab::detail {

struct SwSetup {
  double lambda = 1.0, w = 1.0;
  cd z1, z2;
  double eps1 = 0.0, eps2 = 0.0;
  double p_max = 0.0, d_est = 0.0;
};

inline SwSetup make_sw_setup(double w, const SignatureSpec& sig, double lambda, const SwQuadConfig& qc) {
  SwSetup s;
  s.lambda = lambda;
  s.w = w;
  s.z1 = sig.z[0];
  s.z2 = sig.z[1];
  s.eps1 = s.z1.imag();
  s.eps2 = -s.z2.imag();
  s.p_max = std::sqrt(2.0 * qc.p_tail / w);
  // distance of the nearest Det pole from the real P axis, roughly
  s.d_est = 0.9 * std::min(s.eps1 + s.eps2, lambda + std::min(s.eps1, s.eps2));
  return s;
}

// Boost cutoff where the P-integrated integrand has decayed like
// exp(-kappa cosh r) by r_tail.
inline double sw_r_max(const SwSetup& s, const SwQuadConfig& qc) {
  const double kappa = s.lambda * s.w * (s.eps1 + s.eps2);
  return std::acosh(1.0 + qc.r_tail / kappa);
}

// Gauss-Legendre in r over [r_lo, r_hi], trapezoid in (p+, p-). f(A, v)
// fills Dim values at A = Q - i s z (chi = 0); the sweep returns their sums
// weighted by the d nu(iQ) density times the pulled-back DQ, and the weight
// sum alone in the last slot. chi contributes 2 pi.
template <std::size_t Dim, class F>
std::array<cd, Dim + 1> sw_sweep(const SwSetup& S, const SwQuadConfig& qc, int r_nodes, double r_lo, double r_hi,
                                 double h_scale, F&& f) {
  const Rule rr = gauss_legendre(r_nodes, r_lo, r_hi);
  std::array<cd, Dim + 1> out{};
  const double lam = S.lambda, w = S.w;
  for (std::size_t k = 0; k < rr.size(); ++k) {
    const double r = rr.nodes[k];
    const double c = std::cosh(r), s = std::sinh(r);
    const double omega = w * lam * c;
    const double h = qc.h_factor * h_scale * 2 * M_PI / (omega + 36.0 / S.d_est);
    const Rule pr = trapezoid_symmetric(S.p_max, h);
    const std::size_t np = pr.size();
    std::vector<cd> g(np), a(np), b(np);
    cd gsum = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
      const double p = pr.nodes[i];
      g[i] = pr.weights[i] * std::exp(cd(-0.5 * w * p * p, omega * p));
      gsum += g[i];
      a[i] = lam * c + cd(0, p) - cd(0, 1) * S.z1;
      b[i] = lam * c + cd(0, p) + cd(0, 1) * S.z2;
    }
    std::array<cd, Dim> inner{};
    Mat2c A;
    A(0, 1) = A(1, 0) = lam * s;
    std::array<cd, Dim> v;
    for (std::size_t i = 0; i < np; ++i) {
      std::array<cd, Dim> row{};
      A(0, 0) = a[i];
      for (std::size_t j = 0; j < np; ++j) {
        A(1, 1) = b[j];
        f(A, v);
        for (std::size_t d = 0; d < Dim; ++d) row[d] += g[j] * v[d];
      }
      for (std::size_t d = 0; d < Dim; ++d) inner[d] += g[i] * row[d];
    }
    const cd jac = chart_jacobian(lam, SwCoords{r, 0.0, 0.0, 0.0});
    // exp(w lambda^2) from 1/2 w Tr(sQsQ)
    const cd pref = rr.weights[k] * jac * std::exp(w * lam * lam) * (2 * M_PI);
    for (std::size_t d = 0; d < Dim; ++d) out[d] += pref * inner[d];
    out[Dim] += pref * gsum * gsum;
  }
  return out;
}

}  // namespace susylab::detail
