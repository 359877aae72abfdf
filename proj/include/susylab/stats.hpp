#pragma once
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace susylab {

// Welford accumulator with Chan's pairwise merge.
struct RunningMoments {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const RunningMoments& other);
  double variance() const;  // unbiased
  double std_error() const;
};

struct ComplexAccumulator {
  RunningMoments re, im;
  double max_abs = 0.0;

  void add(std::complex<double> x);
  void merge(const ComplexAccumulator& other);
  std::int64_t count() const { return re.count; }
  std::complex<double> mean() const { return {re.mean, im.mean}; }
};

struct GreensEstimate {
  std::complex<double> value{};
  double se_re = 0.0;
  double se_im = 0.0;
  std::int64_t num_samples = 0;
  std::uint64_t seed = 0;
  std::int64_t retries = 0;
  std::int64_t flagged = 0;

  double se_max() const { return se_re > se_im ? se_re : se_im; }
};

// z = max over real/imag parts of |a - b| / sqrt(se_a^2 + se_b^2)
double z_score(const GreensEstimate& a, const GreensEstimate& b);

// component-wise median; even lengths average the two central values
double median(std::vector<double> v);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace susylab
