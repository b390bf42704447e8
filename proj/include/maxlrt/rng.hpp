#pragma once

#include <cstdint>
#include <random>

namespace maxlrt {

/// Reproducible random stream identified by (seed, stream id).
///
/// Two streams constructed from the same pair produce the same draws.
/// Parallel consumers take `substream(i)` keyed by work-item index, never
/// by worker, so results do not depend on scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Child stream with the same seed and an id derived from (stream_id, index).
  RngStream substream(std::uint64_t index) const;

  /// Uniform draw strictly inside (0, 1).
  double uniform();
  /// Standard normal draw (inverse-CDF method).
  double normal();

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace maxlrt
