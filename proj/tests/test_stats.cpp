#include "doctest.h"
#include "susylab/montecarlo.hpp"
#include "susylab/rng.hpp"
#include "susylab/stats.hpp"

#include <cmath>

using namespace susylab;

TEST_CASE("welford matches two-pass and merge is exact") {
  std::vector<double> x;
  Stream s(1, 0);
  for (int k = 0; k < 1001; ++k) x.push_back(3.0 + s.normal());
  RunningMoments all, a, b;
  for (std::size_t k = 0; k < x.size(); ++k) {
    all.add(x[k]);
    (k < 400 ? a : b).add(x[k]);
  }
  a.merge(b);
  double mean = 0;
  for (double v : x) mean += v;
  mean /= x.size();
  double var = 0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= (x.size() - 1);
  CHECK(all.mean == doctest::Approx(mean).epsilon(1e-13));
  CHECK(all.variance() == doctest::Approx(var).epsilon(1e-12));
  CHECK(a.mean == doctest::Approx(mean).epsilon(1e-13));
  CHECK(a.variance() == doctest::Approx(var).epsilon(1e-12));
}

TEST_CASE("z score") {
  GreensEstimate a, b;
  a.value = {1.0, 0.0};
  b.value = {1.3, 0.1};
  a.se_re = b.se_re = 0.1;
  a.se_im = b.se_im = 0.1;
  CHECK(z_score(a, b) == doctest::Approx(0.3 / std::sqrt(0.02)));
}

TEST_CASE("median") {
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 2, 3}) == 2.5);
}

TEST_CASE("least squares recovers a line") {
  std::vector<double> x{1, 2, 3, 4, 5}, y;
  for (double v : x) y.push_back(2.0 - 0.5 * v);
  const auto f = least_squares(x, y);
  CHECK(f.slope == doctest::Approx(-0.5));
  CHECK(f.intercept == doctest::Approx(2.0));
  CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("monte carlo reduction is worker-count independent") {
  auto fn = [](std::uint64_t d, std::uint32_t) -> std::optional<std::complex<double>> {
    Stream s(99, d);
    return std::complex<double>(s.normal(), s.normal());
  };
  const McRun r1 = run_mc_scalar(McConfig{50001, 99, 1}, fn);
  const McRun r8 = run_mc_scalar(McConfig{50001, 99, 8}, fn);
  const auto e1 = r1.estimate(0, 99), e8 = r8.estimate(0, 99);
  CHECK(e1.value == e8.value);
  CHECK(e1.se_re == e8.se_re);
  CHECK(r1.median_of_means(0) == r8.median_of_means(0));
  CHECK(e1.num_samples == 50001);
}

TEST_CASE("retries are counted") {
  const McRun r = run_mc_scalar(McConfig{1000, 1, 2}, [](std::uint64_t d, std::uint32_t a) -> std::optional<std::complex<double>> {
    if (d % 10 == 0 && a == 0) return std::nullopt;
    return std::complex<double>(1.0, 0.0);
  });
  CHECK(r.retries == 100);
  CHECK(r.estimate(0, 1).value.real() == 1.0);
}
