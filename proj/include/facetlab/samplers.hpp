#pragma once

#include <cstdint>
#include <iterator>

#include "facetlab/path.hpp"
#include "facetlab/rng.hpp"

namespace facetlab {

/// Length n with P[n] = r^n (1 - r), by inversion.
std::uint64_t sample_geometric(double r, RngStream& rng);

LatticePath sample_free(const ModelParams& params, RngStream& rng);

Bridge sample_bridge_uniform(Point a, Point b, RngStream& rng);

/// True when no vertex of the bridge lies strictly above the chord [a, b].
bool below_chord(const Bridge& bridge);
/// Signed test of a single point against the chord; > 0 means strictly above.
inline std::int64_t above_chord(Point a, Point b, Point v) {
  return (b.x - a.x) * (v.y - a.y) - (b.y - a.y) * (v.x - a.x);
}

/// Uniform sampler on bridges weakly below their chord.
///
/// Uses rejection from uniform bridges unless a calibration batch accepts
/// less than `min_rate`, in which case it falls back to a corner-flip chain
/// restricted to the below-chord set.
class BelowChordSampler {
 public:
  struct Options {
    std::size_t calibration = 2000;
    double min_rate = 1e-3;
    std::size_t fallback_sweeps = 200;
  };

  BelowChordSampler(Point a, Point b, RngStream& rng);
  BelowChordSampler(Point a, Point b, RngStream& rng, Options opts);

  Bridge draw(RngStream& rng);
  bool approximate() const { return fallback_; }
  double calibration_rate() const { return rate_; }

 private:
  Point a_;
  Point b_;
  Options opts_;
  double rate_ = 1.0;
  bool fallback_ = false;
  Bridge state_;
};

Bridge sample_bridge_below(Point a, Point b, RngStream& rng);

struct RejectionDraw {
  LatticePath path;
  std::uint64_t attempts = 0;
};

/// Exact draw from the conditioned measure by rejection from sample_free.
RejectionDraw sample_conditioned_rejection(const ModelParams& params, RngStream& rng,
                                           std::uint64_t max_attempts);

/// All paths of length <= max_len, ordered by (length, bit pattern).
class PathEnumeration {
 public:
  static constexpr std::size_t kMaxLength = 26;

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = LatticePath;
    using difference_type = std::ptrdiff_t;
    using pointer = const LatticePath*;
    using reference = const LatticePath&;

    iterator() = default;
    iterator(std::size_t len, std::uint64_t pattern) : len_(len), pattern_(pattern) {}

    LatticePath operator*() const;
    iterator& operator++();
    iterator operator++(int) {
      auto t = *this;
      ++*this;
      return t;
    }
    friend bool operator==(const iterator&, const iterator&) = default;

   private:
    std::size_t len_ = 0;
    std::uint64_t pattern_ = 0;
  };

  explicit PathEnumeration(std::size_t max_len);
  iterator begin() const { return iterator(0, 0); }
  iterator end() const { return iterator(max_len_ + 1, 0); }
  std::uint64_t size() const { return (std::uint64_t{2} << max_len_) - 1; }

 private:
  std::size_t max_len_;
};

PathEnumeration enumerate_paths(std::size_t max_len);

/// Path of the given length whose step i is bit (len - 1 - i) of `pattern`.
LatticePath path_from_pattern(std::size_t len, std::uint64_t pattern);

}  // namespace facetlab
