#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>

namespace capcov {

/// Stream generator: std::mt19937_64 seeded from splitmix64(seed, stream).
/// Uniforms are 53-bit doubles in (0, 1); normals use Box-Muller. Every
/// draw is defined here rather than through <random> distributions, whose
/// output is implementation-specific, so sequences replay across toolchains.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  double uniform();  // open interval (0, 1)
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

/// Identity string echoed into run headers.
std::string rng_identity();

/// Fixed chunking used by every Monte Carlo loop: trial i belongs to chunk
/// i / kChunkSize, and each chunk has its own Rng stream. Results depend only
/// on the seed, never on how chunks are spread over workers.
inline constexpr long kChunkSize = 4096;

/// Runs body(chunk, begin, end) over all chunks of [0, trials), on up to
/// `workers` threads (0 = hardware concurrency). The body must write only
/// to per-chunk state. Exceptions are rethrown on the caller's thread.
void for_each_chunk(long trials, int workers,
                    const std::function<void(long chunk, long begin, long end)>& body);

}  // namespace capcov
