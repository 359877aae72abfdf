#include "susylab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "susylab/errors.hpp"

namespace susylab {

void RunningMoments::add(double x) {
  ++count;
  const double d = x - mean;
  mean += d / static_cast<double>(count);
  m2 += d * (x - mean);
}

void RunningMoments::merge(const RunningMoments& o) {
  if (o.count == 0) return;
  if (count == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(count);
  const double nb = static_cast<double>(o.count);
  const double n = na + nb;
  const double d = o.mean - mean;
  mean += d * nb / n;
  m2 += o.m2 + d * d * na * nb / n;
  count += o.count;
}

double RunningMoments::variance() const {
  return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
}

double RunningMoments::std_error() const {
  return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
}

void ComplexAccumulator::add(std::complex<double> x) {
  re.add(x.real());
  im.add(x.imag());
  max_abs = std::max(max_abs, std::abs(x));
}

void ComplexAccumulator::merge(const ComplexAccumulator& o) {
  re.merge(o.re);
  im.merge(o.im);
  max_abs = std::max(max_abs, o.max_abs);
}

double z_score(const GreensEstimate& a, const GreensEstimate& b) {
  const double dr = std::abs(a.value.real() - b.value.real());
  const double di = std::abs(a.value.imag() - b.value.imag());
  const double sr = std::hypot(a.se_re, b.se_re);
  const double si = std::hypot(a.se_im, b.se_im);
  auto part = [](double d, double s) {
    if (s > 0.0) return d / s;
    return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  };
  return std::max(part(dr, sr), part(di, si));
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("least_squares: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace susylab

#include "susylab/montecarlo.hpp"

namespace susylab {

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

namespace detail {
std::vector<Chunk> make_chunks(std::int64_t num_samples, int* num_groups) {
  constexpr std::int64_t kChunk = 2048;
  const int g = static_cast<int>(std::min<std::int64_t>(kMomGroups, num_samples));
  *num_groups = g;
  std::vector<Chunk> chunks;
  for (int k = 0; k < g; ++k) {
    const std::int64_t lo = num_samples * k / g;
    const std::int64_t hi = num_samples * (k + 1) / g;
    for (std::int64_t b = lo; b < hi; b += kChunk) chunks.push_back({b, std::min(hi, b + kChunk), k});
  }
  return chunks;
}
}  // namespace detail

GreensEstimate McRun::estimate(std::size_t k, std::uint64_t seed) const {
  GreensEstimate e;
  e.value = total.at(k).mean();
  e.se_re = total[k].re.std_error();
  e.se_im = total[k].im.std_error();
  e.num_samples = total[k].count();
  e.seed = seed;
  e.retries = retries;
  e.flagged = flagged;
  return e;
}

std::complex<double> McRun::median_of_means(std::size_t k) const {
  std::vector<double> re, im;
  for (const auto& g : groups) {
    re.push_back(g.at(k).re.mean);
    im.push_back(g[k].im.mean);
  }
  return {median(re), median(im)};
}

}  // namespace susylab
