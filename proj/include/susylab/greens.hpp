#pragma once
#include <optional>
#include <utility>
#include <vector>

#include "susylab/ensemble.hpp"
#include "susylab/montecarlo.hpp"
#include "susylab/stats.hpp"

namespace susylab {

// Per-draw spectral data; resolvent entries are assembled from eigenpairs.
struct Spectrum {
  VecR eval;
  MatC evec;
  explicit Spectrum(const MatC& h);
  // (z - H)^{-1}_{ab}
  cd resolvent(cd z, Eigen::Index a, Eigen::Index b) const;
  double min_gap(cd z) const;  // min_k |z - lambda_k|
};

// Tr Pi_i (z - H)^{-1} for one matrix
cd g1_of(const EnsembleSpec& spec, const Spectrum& sp, std::size_t site, cd z);
// Tr Pi_i (z1 - H)^{-1} Pi_j (z2 - H)^{-1} from dense linear solves
cd g2_direct_of(const EnsembleSpec& spec, const MatC& h, std::size_t i, std::size_t j, cd z1, cd z2);

// Per-draw determinant-ratio route: the s,t mixed derivative of
// Det(z1-H) Det(z2-H) / (Det(z1-H-sE) Det(z2-H+tE')) via cofactors. With
// orbitals unset, the full orbital trace is summed. cond receives the
// largest condition number of z1-H, z2-H.
cd g2_detratio_of(const EnsembleSpec& spec, const MatC& h, std::size_t i, std::size_t j,
                  std::optional<int> orbital_a, std::optional<int> orbital_b, cd z1, cd z2,
                  double* cond = nullptr);

inline constexpr double kCondGuard = 1e12;

GreensEstimate estimate_g1(const EnsembleSpec& spec, std::size_t site, cd z, const McConfig& mc);
GreensEstimate estimate_g2(const EnsembleSpec& spec, std::size_t i, std::size_t j, cd z1, cd z2,
                           const McConfig& mc);
GreensEstimate estimate_g2_detratio(const EnsembleSpec& spec, std::size_t i, std::size_t j,
                                    std::optional<int> orbital_a, std::optional<int> orbital_b, cd z1,
                                    cd z2, const McConfig& mc);
// G2(i, j) for many j at once, sharing draws.
std::vector<GreensEstimate> g2_profile(const EnsembleSpec& spec, std::size_t i,
                                       const std::vector<std::size_t>& js, cd z1, cd z2,
                                       const McConfig& mc);

struct DosPoint {
  double E, rho, se;
};
// Grid point k uses seed mix_seed(seed, k).
std::vector<DosPoint> dos_profile(const EnsembleSpec& spec, std::size_t site, const std::vector<double>& grid,
                                  double epsilon, const McConfig& mc);

struct LyapunovFit {
  double lambda = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::pair<double, double> fit_range;
  std::size_t num_points = 0;
};
// values: (distance, |G2|); fit log|G2| = intercept - lambda * distance over
// distances within [range.first, range.second].
LyapunovFit lyapunov_fit(const std::vector<std::pair<double, double>>& values, std::pair<double, double> range);

// Level spacings
double wigner_gue_pdf(double s);
double wigner_gue_cdf(double s);
// Unfolded nearest-neighbour spacings of one spectrum: local mean spacing over
// `window` levels, central `bulk_fraction` of the levels.
std::vector<double> unfolded_spacings(std::vector<double> levels, int window, double bulk_fraction = 0.6);
// KS distance of the sample (renormalised to unit mean) to a CDF.
double ks_distance(std::vector<double> s, double (*cdf)(double));

struct SpacingStats {
  std::vector<double> bin_edges;  // size bins + 1
  std::vector<std::int64_t> counts;
  std::size_t num_spacings = 0;
  double ks_wigner = 0.0;
};
inline constexpr std::size_t kMinSpacings = 1000;
SpacingStats summarize_spacings(std::vector<double> spacings, int bins = 40, double s_max = 4.0);
SpacingStats spacing_stats(const EnsembleSpec& spec, std::int64_t num_samples, int window, std::uint64_t seed,
                           unsigned workers = 0, int bins = 40, double s_max = 4.0);

}  // namespace susylab
