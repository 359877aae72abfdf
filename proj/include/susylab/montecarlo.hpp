#pragma once
#include <algorithm>
#include <atomic>
#include <complex>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "susylab/errors.hpp"
#include "susylab/stats.hpp"

namespace susylab {

struct McConfig {
  std::int64_t num_samples = 100000;
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0: hardware concurrency
};

unsigned resolve_workers(unsigned requested);

inline constexpr int kMomGroups = 32;
inline constexpr int kMaxRetries = 16;

// Result of a vector-valued Monte Carlo run. Draws are split into
// kMomGroups contiguous groups; each group is cut into fixed chunks that are
// accumulated sequentially, then chunks and groups are merged by index. The
// reduction order never depends on the worker count.
struct McRun {
  std::vector<ComplexAccumulator> total;                // per component
  std::vector<std::vector<ComplexAccumulator>> groups;  // [group][component]
  std::int64_t retries = 0;
  std::int64_t flagged = 0;

  GreensEstimate estimate(std::size_t component, std::uint64_t seed) const;
  std::complex<double> median_of_means(std::size_t component) const;
};

// Signals from a draw function.
enum class DrawStatus { ok, flagged, retry };

namespace detail {
struct Chunk {
  std::int64_t begin, end;
  int group;
};
std::vector<Chunk> make_chunks(std::int64_t num_samples, int* num_groups);
}  // namespace detail

// fn(draw, attempt, out) fills `out` (size dim) and returns a DrawStatus.
// A `retry` status redraws the same index with attempt + 1.
template <class Fn>
McRun run_mc(const McConfig& mc, std::size_t dim, Fn&& fn) {
  if (mc.num_samples < 1) throw InvalidInput("num_samples must be positive");
  int num_groups = 0;
  const auto chunks = detail::make_chunks(mc.num_samples, &num_groups);
  struct ChunkOut {
    std::vector<ComplexAccumulator> acc;
    std::int64_t retries = 0, flagged = 0;
    bool failed = false;
  };
  std::vector<ChunkOut> out(chunks.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    std::vector<std::complex<double>> buf(dim);
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks.size()) return;
      ChunkOut& o = out[c];
      o.acc.assign(dim, {});
      for (std::int64_t d = chunks[c].begin; d < chunks[c].end; ++d) {
        DrawStatus st = DrawStatus::retry;
        std::uint32_t attempt = 0;
        for (; attempt < static_cast<std::uint32_t>(kMaxRetries); ++attempt) {
          st = fn(static_cast<std::uint64_t>(d), attempt, std::span<std::complex<double>>(buf));
          if (st != DrawStatus::retry) break;
          ++o.retries;
        }
        if (st == DrawStatus::retry) {
          o.failed = true;
          return;
        }
        if (st == DrawStatus::flagged) ++o.flagged;
        for (std::size_t k = 0; k < dim; ++k) o.acc[k].add(buf[k]);
      }
    }
  };

  const unsigned nw = std::min<unsigned>(resolve_workers(mc.workers),
                                         static_cast<unsigned>(chunks.size()));
  if (nw <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < nw; ++w) pool.emplace_back(work);
  }

  McRun run;
  run.total.assign(dim, {});
  run.groups.assign(num_groups, std::vector<ComplexAccumulator>(dim));
  for (std::size_t c = 0; c < chunks.size(); ++c) {
    if (out[c].failed) throw NumericalFailure("draw kept failing after retries");
    run.retries += out[c].retries;
    run.flagged += out[c].flagged;
    for (std::size_t k = 0; k < dim; ++k) run.groups[chunks[c].group][k].merge(out[c].acc[k]);
  }
  for (int g = 0; g < num_groups; ++g)
    for (std::size_t k = 0; k < dim; ++k) run.total[k].merge(run.groups[g][k]);
  return run;
}

// Scalar convenience wrapper: fn(draw, attempt) -> optional value; nullopt
// requests a retry.
template <class Fn>
McRun run_mc_scalar(const McConfig& mc, Fn&& fn) {
  return run_mc(mc, 1, [&](std::uint64_t d, std::uint32_t a, std::span<std::complex<double>> out) {
    const std::optional<std::complex<double>> v = fn(d, a);
    if (!v) return DrawStatus::retry;
    out[0] = *v;
    return DrawStatus::ok;
  });
}

}  // namespace susylab
