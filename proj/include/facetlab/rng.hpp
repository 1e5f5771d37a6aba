#pragma once

#include <cstdint>
#include <limits>

namespace facetlab {

/// Counter-based random stream.
///
/// Draw number `i` of the stream keyed by (seed, stream_id) is a pure function
/// of the triple (seed, stream_id, i), so a stream can be checkpointed as three
/// integers and replayed independently of thread scheduling.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open();
  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t uniform_below(std::uint64_t n);
  bool bernoulli(double p);
  bool coin() { return (next_u64() >> 63) != 0; }

  /// Independent child stream derived from this stream's key.
  RngStream child(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_;
  std::uint64_t key_lo_;
  std::uint64_t key_hi_;
};

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace facetlab
