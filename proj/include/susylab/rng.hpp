#pragma once
#include <array>
#include <complex>
#include <cstdint>

namespace susylab {

// Philox4x32-10 (Salmon et al. 2011). Counter based, so any draw can be
// regenerated from (seed, draw index) without replaying a sequence.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// Independent stream for one draw. `substream` separates retries and
// unrelated uses of the same draw index.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t draw, std::uint32_t substream = 0);

  std::uint64_t next_u64();
  double uniform();           // (0, 1)
  double normal();            // N(0, 1)
  // circular complex normal with E|z|^2 = variance
  std::complex<double> complex_normal(double variance);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// SplitMix64 finalizer; used to derive child seeds (grid points, fixtures).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace susylab
