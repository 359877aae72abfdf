#pragma once
#include <cstdint>
#include <functional>
#include <string>

#include "susylab/linalg.hpp"
#include "susylab/rng.hpp"

namespace susylab {

struct LatticeSpec {
  std::size_t num_sites = 1;
  // Injected metric; defaults to the open 1-D chain |i - j|.
  std::function<double(std::size_t, std::size_t)> metric;

  static LatticeSpec chain(std::size_t num_sites);
  double distance(std::size_t i, std::size_t j) const;
};

struct ValidationReport {
  bool symmetric = false;
  bool all_positive = false;
  bool positive_definite = false;
  bool w_offdiag_nonpositive = false;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double max_offdiag_w = 0.0;  // largest off-diagonal w_ij (should be <= 0)

  bool ok_for_sampling() const { return symmetric && all_positive && positive_definite; }
  bool ok_for_schafer_wegner() const { return ok_for_sampling() && w_offdiag_nonpositive; }
  std::string summary() const;
};

inline constexpr double kPdRelTol = 1e-10;
inline constexpr double kWTol = 1e-12;

struct CovarianceSpec {
  MatR J;
  MatR w;  // J^{-1}
  ValidationReport report;
};

ValidationReport validate_covariance(const CovarianceSpec& cov);

CovarianceSpec build_covariance(const LatticeSpec& lattice, const std::function<double(double)>& profile,
                                double scale);
CovarianceSpec covariance_from_matrix(const MatR& J);

struct EnsembleSpec {
  LatticeSpec lattice;
  int orbitals = 1;
  CovarianceSpec covariance;

  std::size_t num_sites() const { return lattice.num_sites; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(orbitals * lattice.num_sites); }
  Eigen::Index index(std::size_t site, int orbital) const {
    return static_cast<Eigen::Index>(site * orbitals + orbital);
  }
  std::size_t site_of(Eigen::Index k) const { return static_cast<std::size_t>(k / orbitals); }
  const MatR& J() const { return covariance.J; }
  const MatR& w() const { return covariance.w; }
  // Stable identifier derived from the numeric content.
  std::uint64_t id() const;
};

EnsembleSpec make_spec(std::size_t num_sites, int orbitals, const MatR& J);

struct HermitianSample {
  MatC matrix;
  std::uint64_t spec_id = 0;
  std::uint64_t seed = 0;
  std::uint64_t draw = 0;
};

// Throws Refusal if the spec failed validation.
HermitianSample sample(const EnsembleSpec& spec, std::uint64_t seed, std::uint64_t draw = 0);
// Hot-path variant: fills `h` from the stream. Assumes a validated spec.
void sample_into(const EnsembleSpec& spec, Stream& stream, MatC& h);
void require_sampling_ok(const EnsembleSpec& spec);

// J(K, K') = sum_ij J_ij Tr(Pi_i K Pi_j K')
cd j_form(const EnsembleSpec& spec, const MatC& K, const MatC& K2);
// Omega(K) = exp(-J(K,K)/2)
cd characteristic_fn(const EnsembleSpec& spec, const MatC& K);

}  // namespace susylab
