#pragma once
#include <string>
#include <utility>
#include <vector>

#include "susylab/ensemble.hpp"
#include "susylab/montecarlo.hpp"
#include "susylab/stats.hpp"

namespace susylab {

struct SignatureSpec {
  std::vector<cd> z;

  static SignatureSpec of(std::vector<cd> z) { return SignatureSpec{std::move(z)}; }
  int n() const { return static_cast<int>(z.size()); }
  int p() const;  // count with Im z > 0
  int q() const { return n() - p(); }
  double s(int alpha) const { return z.at(alpha).imag() > 0 ? 1.0 : -1.0; }
  MatC s_matrix() const;
  MatC z_matrix() const;
  // first p entries upper half plane, the rest lower; no real entries
  bool ordered() const;
};

enum class Verdict { consistent, inconsistent, inconclusive };
const char* to_string(Verdict v);
// consistent below 3, inconsistent above 5
Verdict verdict_for(double z);

struct DualityReport {
  std::string op;
  GreensEstimate lhs, rhs;
  double z_score = 0.0;
  Verdict verdict = Verdict::inconclusive;
  // median of 32 group means, and |mean - median| in units of the standard
  // error; large ratios flag heavy tails
  cd lhs_median{}, rhs_median{};
  double lhs_tail_ratio = 0.0, rhs_tail_ratio = 0.0;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> notes;

  void finish();  // z_score and verdict from lhs, rhs
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
};

inline constexpr std::int64_t kMinBudget = 1000;

// LHS estimators shared by the verification ops.
// prod_alpha Det(z_alpha - H)
McRun lhs_det_products(const EnsembleSpec& spec, const SignatureSpec& sig, const McConfig& mc);
// prod_alpha Det^{-1}(z_alpha - H)
McRun lhs_inverse_det_products(const EnsembleSpec& spec, const SignatureSpec& sig, const McConfig& mc);

// Correlated Gaussian Q sampler for d nu_{n,J}: J = O diag(L) O^T once, then
// Q_i = sum_k O_ik G_k with independent Hermitian G_k of variance L_k.
class QSampler {
 public:
  QSampler(const EnsembleSpec& spec, int n);
  void draw(Stream& st, std::vector<MatC>& q) const;
  int n() const { return n_; }

 private:
  int n_;
  MatR o_;
  VecR lambda_;
};

DualityReport verify_fermionic(const EnsembleSpec& spec, const SignatureSpec& sig, const McConfig& mc);
DualityReport verify_bosonic_same_half(const EnsembleSpec& spec, const SignatureSpec& sig, const McConfig& mc);
DualityReport falsify_naive(const EnsembleSpec& spec, const SignatureSpec& sig, const McConfig& mc);

// Fyodorov's formula over positive Hermitian M.
struct FyodorovConfig {
  int m_nodes = 48;      // radial/eigenvalue Gauss-Legendre nodes per coordinate
  int angle_nodes = 24;  // u = cos 2 theta nodes for n = 2
  double tail = 40.0;    // truncate where the decay exponent reaches this
  bool force_sampling = false;
};
// Integrand exp(-1/2 sum J_ij Tr(s M_i s M_j) + i sum Tr(s z M_k)), without
// the Det^{N-n} density.
cd fyodorov_integrand(const EnsembleSpec& spec, const SignatureSpec& sig, const std::vector<MatC>& m);
// prod_alpha (-i s_alpha)^{N |Lambda|}
cd bosonic_phase(const SignatureSpec& sig, int orbitals, std::size_t num_sites);
// Random element of U(p,q) as exp of a random Lie algebra element.
MatC random_upq(int p, int q, Stream& st, double scale = 0.5);

struct QuadValue {
  cd value{};
  double delta = 0.0;  // node-doubling difference
};
// Deterministic RHS; n = 1 any |Lambda| <= 2, n = 2 with |Lambda| = 1.
QuadValue fyodorov_quadrature(const EnsembleSpec& spec, const SignatureSpec& sig, const FyodorovConfig& fc);
// Wishart importance sampling of the RHS (any n, |Lambda|).
GreensEstimate fyodorov_sampled(const EnsembleSpec& spec, const SignatureSpec& sig, const McConfig& mc);
DualityReport verify_fyodorov(const EnsembleSpec& spec, const SignatureSpec& sig, const McConfig& mc,
                              const FyodorovConfig& fc = {});

// Normalized bosonic Gaussian reference: int exp(-(phibar, A phi)) = Det A^{-1}
// with the measure normalized by int exp(-(phibar, phi)) = 1.
GreensEstimate bosonic_gaussian_mc(const MatC& A, const McConfig& mc);
QuadValue bosonic_gaussian_quadrature(const MatC& A, int nodes = 40);

}  // namespace susylab
