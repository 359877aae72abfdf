#pragma once
#include <array>

#include "susylab/sw.hpp"

namespace susylab {

// K(B; t2) = < Det(D - rho B sigma) >, averaged over the odd blocks sigma =
// Q_BF, rho = Q_FB with weight exp(w Tr(s_B sigma rho)) and over Hermitian
// Q_FF with weight exp(-w Tr Q_FF^2 / 2), both normalized; D = Q_FF - i z -
// i t2 E22. K is a quadratic polynomial in the entries of B.
struct SusyKernel {
  // monomials: 1, b11, b12, b21, b22, then b_k b_l for k <= l in that order
  std::array<cd, 15> k0{};  // t2^0
  std::array<cd, 15> k2{};  // t2^1

  cd eval0(const Mat2c& B) const;
  cd eval2(const Mat2c& B) const;
  // d/dt K2(B + t dB) at t = 0
  cd deriv2(const Mat2c& B, const Mat2c& dB) const;
};

// Direct symbolic evaluation at one B: returns (t2^0, t2^1) parts.
std::pair<cd, cd> susy_kernel_at(double w, cd z1, cd z2, const Mat2c& B);
// Polynomial coefficients from 15 probe evaluations around B = 1.
SusyKernel build_susy_kernel(double w, cd z1, cd z2);

struct SusyResult {
  DualityReport report;      // derivative check: LHS Monte Carlo G2, RHS superintegral
  QuadValue normalization;   // RHS at t1 = t2 = 0 (LHS identically 1)
  QuadValue derivative;      // d^2/dt1 dt2 of the RHS at 0
  cd ff_kernel{};            // K(0; 0) = <Det(Q_FF - i z)>
  double tail = 0.0;
};
// Single site, one orbital, Im z1 > 0 > Im z2.
SusyResult verify_susy_g2(const EnsembleSpec& spec, const SignatureSpec& sig, double lambda,
                          const SwQuadConfig& qc, const McConfig& mc);

}  // namespace susylab
