#pragma once
#include <vector>

#include "susylab/duality.hpp"

namespace susylab {

enum class QDomainKind { HermitianFull, HermPositive, SchaeferWegner };

struct QDomain {
  QDomainKind kind = QDomainKind::SchaeferWegner;
  double lambda = 1.0;
  double r_max = 0.0;  // boost cutoff actually used
  double p_max = 0.0;  // half-width of the Im Q window
};

struct SwQuadConfig {
  int r_nodes = 96;
  double r_tail = 36.0;  // decay exponent reached at the boost cutoff
  double p_tail = 40.0;  // w p_max^2 / 2
  double h_factor = 1.0;
  int chi_nodes = 32;  // shift_invariance only
  int gh_nodes = 8;    // shift_invariance only
};

// Chart of X_lambda^{p,q}: Re Q = lambda T T*, with T T* = exp([[0, Z], [Z^dagger, 0]])
// for Z in C^{p x q}, and Im Q = diag(P+, P-).
MatC cartan_point(const MatC& Z);
MatC sw_point(double lambda, const MatC& Z, const MatC& p_plus, const MatC& p_minus);

// p = q = 1 coordinates: Z = r e^{i chi}
struct SwCoords {
  double r = 0.0, chi = 0.0, p_plus = 0.0, p_minus = 0.0;
};
MatC sw_point(double lambda, const SwCoords& x);
// d(Q11, Q12, Q21, Q22)/d(r, chi, p+, p-) by central differences with one
// Richardson step; its determinant is the pullback of the holomorphic DQ.
MatC chart_pushforward(double lambda, const SwCoords& x, double step = 1e-3);
cd chart_jacobian(double lambda, const SwCoords& x, double step = 1e-3);
// Rank of the real pushforward of the (p, q) chart at a random point.
int chart_dimension(int p, int q, Stream& st);

// |F_M| = exp(-(f1 + f2 + f3)/4), evaluated for arbitrary Q_i, M_i.
struct SwDecay {
  double f1 = 0.0, f2 = 0.0, f3 = 0.0;
};
SwDecay sw_decay(const MatR& w, const SignatureSpec& sig, const std::vector<MatC>& q, const std::vector<MatC>& m);
// F_M(Q) = exp(1/2 sum w_ij Tr(sQ_i + iz)(sQ_j + iz) - sum Tr M_k Q_k)
cd sw_F(const MatR& w, const SignatureSpec& sig, const std::vector<MatC>& q, const std::vector<MatC>& m);
// -2 lambda^2 n sum_i w_ii
double f2_lower_bound(const MatR& w, double lambda, int n);

struct F2BoundCheck {
  std::int64_t points = 0;
  std::int64_t violations = 0;
  double bound = 0.0;
  double min_f2 = 0.0;
};
// Random domain points (per-site boosts and P), p = q = 1.
F2BoundCheck check_f2_bound(const EnsembleSpec& spec, double lambda, std::int64_t points, std::uint64_t seed,
                            double r_scale = 2.0);

// lambda = sqrt(N / sum_j w_0j), the constant-saddle value.
double default_lambda(const EnsembleSpec& spec);

// Exact int_X exp(1/2 w Tr sQsQ) DQ with the flat holomorphic DQ on one
// site (n = 2, p = q = 1): 4 pi^2 i / w^2, independent of lambda.
cd sw_flat_normalization(double w);

struct SwResult {
  DualityReport report;
  QuadValue rhs;
  QuadValue normalization;  // int d nu(iQ) with the exact flat normalization divided out
  double tail = 0.0;        // |contribution| beyond the boost cutoff
  QDomain domain;
};
// Wegner's formula for p = q = 1 at one site; LHS by Monte Carlo.
SwResult verify_schafer_wegner(const EnsembleSpec& spec, const SignatureSpec& sig, double lambda,
                               const SwQuadConfig& qc, const McConfig& mc);

struct ShiftPoint {
  double t = 0.0;
  cd value{};
  double se = 0.0;
  bool usable = true;
};
struct ShiftResult {
  std::vector<ShiftPoint> points;
  cd exact{};  // exp(-1/2 J Tr(sMsM) + i Tr(szM))
  double max_pairwise_z = 0.0;
  double largest_usable_t = 0.0;
  QDomain domain;
};
// int_{X(t)} F_M DQ / int_X d nu(iQ) at one site with M from phi.
ShiftResult shift_invariance(const EnsembleSpec& spec, const SignatureSpec& sig, double lambda,
                             const std::vector<double>& t_grid, const MatC& M, const SwQuadConfig& qc);

}  // namespace susylab
