#pragma once

#include <cstdint>

namespace atomprune {

/// Deterministic splittable random stream.
///
/// A SplitMix64 sequence (Steele, Lea, Flood 2014; gamma 0x9E3779B97F4A7C15,
/// finalizer constants 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB) whose initial
/// state is a hash of (seed, stream index). The same (seed, index) pair yields
/// the same sample sequence on any platform; distinct indices give
/// statistically independent streams. These constants are frozen: stored
/// results depend on them.
///
/// Normal deviates use the Marsaglia polar transform with one cached spare.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_index = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1), 53 random bits.
  double next_uniform() noexcept;

  /// Standard normal deviate.
  double next_gaussian() noexcept;

 private:
  std::uint64_t state_;
  std::uint64_t seed_;
  std::uint64_t stream_index_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace atomprune
