#include "doctest.h"
#include "susylab/rng.hpp"

#include <cmath>
#include <set>

using namespace susylab;

TEST_CASE("philox known-answer vectors") {
  auto r = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(r[0] == 0x6627e8d5u);
  CHECK(r[1] == 0xe169c58du);
  CHECK(r[2] == 0xbc57ac4cu);
  CHECK(r[3] == 0x9b00dbd8u);

  r = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(r[0] == 0x408f276du);
  CHECK(r[1] == 0x41c83b0eu);
  CHECK(r[2] == 0xa20bc7c6u);
  CHECK(r[3] == 0x6d5451fdu);

  r = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  CHECK(r[0] == 0xd16cfe09u);
  CHECK(r[1] == 0x94fdccebu);
  CHECK(r[2] == 0x5001e420u);
  CHECK(r[3] == 0x24126ea1u);
}

TEST_CASE("streams are reproducible and separated") {
  Stream a(7, 3), b(7, 3), c(7, 4), d(7, 3, 1);
  const double x = a.normal();
  CHECK(x == b.normal());
  CHECK(x != c.normal());
  CHECK(x != d.normal());
}

TEST_CASE("normal moments") {
  Stream s(11, 0);
  const int n = 200000;
  double m = 0, v = 0;
  for (int k = 0; k < n; ++k) {
    const double x = s.normal();
    m += x;
    v += x * x;
  }
  m /= n;
  v = v / n - m * m;
  CHECK(std::abs(m) < 4.0 / std::sqrt(n));
  CHECK(std::abs(v - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("complex normal variance") {
  Stream s(5, 9);
  double acc = 0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) acc += std::norm(s.complex_normal(3.0));
  CHECK(std::abs(acc / n - 3.0) < 0.05);
}

TEST_CASE("uniform stays inside (0,1)") {
  Stream s(0, 0);
  for (int k = 0; k < 10000; ++k) {
    const double u = s.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("mix_seed decorrelates neighbours") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t k = 0; k < 1000; ++k) seen.insert(mix_seed(42, k));
  CHECK(seen.size() == 1000);
}
