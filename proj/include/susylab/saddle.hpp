#pragma once
#include <vector>

#include "susylab/linalg.hpp"
#include "susylab/montecarlo.hpp"
#include "susylab/stats.hpp"

namespace susylab {

enum class Branch { hyperbolic_bb, sphere_ff, plus_one_ff, minus_one_ff };
const char* to_string(Branch b);

struct ManifoldPoint {
  Branch branch = Branch::hyperbolic_bb;
  double theta = 0.0;
  double phi = 0.0;
};

// [[cosh t, sinh t e^{i phi}], [sinh t e^{-i phi}, cosh t]] on the BB sheet,
// [[cos t, sin t e^{i phi}], [sin t e^{-i phi}, -cos t]] on the FF sphere,
// +-1 for the isolated FF points.
MatC manifold_point(const ManifoldPoint& pt);

struct SaddleConfig {
  MatR w;
  int orbitals = 1;
  double lambda = 0.0;  // sqrt(N / sum_j w_ij)
};
// Checks sum_j w_ij > 0 and translational invariance (equal row sums).
SaddleConfig make_saddle_config(const MatR& w, int orbitals);
// ||s q s - q^{-1}||_F for one sector.
double sector_residual(const MatC& q, const MatC& s);
// Both sectors, s_BB = diag(1, -1), s_FF = 1: sqrt(bb^2 + ff^2).
double saddle_residual(const MatC& q_bb, const MatC& q_ff);
double saddle_residual(const MatC& q_bb, const MatC& q_ff, const SaddleConfig& cfg);

struct ConstantSaddle {
  double lambda = 0.0;
  // max_i ||sum_j w_ij s Q_j s - N Q_i^{-1}||_F / (N / lambda)
  double residual = 0.0;
};
ConstantSaddle constant_saddle(const SaddleConfig& cfg, const ManifoldPoint& bb = {Branch::hyperbolic_bb, 0, 0},
                               const ManifoldPoint& ff = {Branch::sphere_ff, 0, 0});

inline constexpr double kNullThreshold = 1e-8;
// Null-space dimension of q1 -> s q1 s + q0^{-1} q1 q0^{-1} on the odd blocks,
// entries of q_BF and q_FB taken as 8 independent complex unknowns. Throws
// InvalidInput unless saddle_residual <= 1e-8 (1 + ||q_bb||^2).
int fiber_dimension(const MatC& q_bb, const MatC& q_ff);
// Singular values of the same map, descending.
VecR fiber_singular_values(const MatC& q_bb, const MatC& q_ff);

struct GueMomentQuad {
  int nodes = 0;  // Gauss-Hermite nodes per coordinate; 0 picks N + 1 (exact)
};
struct GueMoment {
  GreensEstimate mc;
  cd quadrature{};
  double quad_delta = 0.0;
  cd saddle{};  // leading steepest-descent value, NaN where not available
  cd ratio{};   // quadrature / saddle
};
// <Det^n(E - H)> over GUE with w = N / lambda^2, against int Det^N(E - iQ)
// exp(-N Tr Q^2 / (2 lambda^2)) dQ over Herm(C^n), normalized.
GueMoment gue_det_moment(int N, int n, double E, double lambda, const McConfig& mc, const GueMomentQuad& qc = {});

}  // namespace susylab
