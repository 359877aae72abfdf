#include <algorithm>
#include <cmath>
#include <numbers>

#include "susylab/errors.hpp"
#include "susylab/greens.hpp"

namespace susylab {

double wigner_gue_pdf(double s) {
  const double pi = std::numbers::pi;
  return s < 0 ? 0.0 : 32.0 / (pi * pi) * s * s * std::exp(-4.0 * s * s / pi);
}

double wigner_gue_cdf(double s) {
  if (s <= 0) return 0.0;
  const double pi = std::numbers::pi;
  return std::erf(2.0 * s / std::sqrt(pi)) - 4.0 * s / pi * std::exp(-4.0 * s * s / pi);
}

std::vector<double> unfolded_spacings(std::vector<double> ev, int window, double bulk_fraction) {
  if (window < 2) throw InvalidInput("unfolding window must be >= 2");
  std::sort(ev.begin(), ev.end());
  const auto n = static_cast<long>(ev.size());
  const double cut = 0.5 * (1.0 - bulk_fraction);
  const long lo = static_cast<long>(std::floor(cut * n));
  const long hi = static_cast<long>(std::ceil((1.0 - cut) * n));
  const long h = window / 2;
  std::vector<double> out;
  for (long k = lo; k < hi - 1; ++k) {
    const long a = std::max(k - h, 0L);
    const long b = std::min(k + h + 1, n - 1);
    const double mean_spacing = (ev[b] - ev[a]) / static_cast<double>(b - a);
    if (mean_spacing > 0) out.push_back((ev[k + 1] - ev[k]) / mean_spacing);
  }
  return out;
}

double ks_distance(std::vector<double> s, double (*cdf)(double)) {
  if (s.empty()) throw InvalidInput("ks_distance: empty sample");
  double mean = 0;
  for (double x : s) mean += x;
  mean /= static_cast<double>(s.size());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double f = cdf(s[k] / mean);
    d = std::max({d, (k + 1) / n - f, f - k / n});
  }
  return d;
}

SpacingStats summarize_spacings(std::vector<double> spacings, int bins, double s_max) {
  if (spacings.size() < kMinSpacings)
    throw Refusal("too few spacings for a spacing histogram (" + std::to_string(spacings.size()) + " < " +
                  std::to_string(kMinSpacings) + ")");
  SpacingStats st;
  st.num_spacings = spacings.size();
  st.ks_wigner = ks_distance(spacings, wigner_gue_cdf);
  double mean = 0;
  for (double x : spacings) mean += x;
  mean /= static_cast<double>(spacings.size());
  st.counts.assign(bins, 0);
  for (int b = 0; b <= bins; ++b) st.bin_edges.push_back(s_max * b / bins);
  for (double x : spacings) {
    const int b = static_cast<int>(std::floor(x / mean / s_max * bins));
    if (b >= 0 && b < bins) ++st.counts[b];
  }
  return st;
}

SpacingStats spacing_stats(const EnsembleSpec& spec, std::int64_t num_samples, int window, std::uint64_t seed,
                           unsigned workers, int bins, double s_max) {
  require_sampling_ok(spec);
  if (num_samples < 1) throw InvalidInput("spacing_stats: num_samples must be positive");
  // Spectra are computed in parallel into fixed slots, concatenated in draw order.
  std::vector<std::vector<double>> per_draw(num_samples);
  McConfig mc{num_samples, seed, workers};
  run_mc(mc, 1, [&](std::uint64_t d, std::uint32_t, std::span<cd> out) {
    Stream st(seed, d);
    MatC h;
    sample_into(spec, st, h);
    Eigen::SelfAdjointEigenSolver<MatC> es(h, Eigen::EigenvaluesOnly);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    per_draw[d] = unfolded_spacings(std::move(ev), window);
    out[0] = 0.0;
    return DrawStatus::ok;
  });
  std::vector<double> all;
  for (auto& v : per_draw) all.insert(all.end(), v.begin(), v.end());
  return summarize_spacings(std::move(all), bins, s_max);
}

}  // namespace susylab
