#pragma once

#include <cstdint>

#include "facetlab/path.hpp"
#include "facetlab/rng.hpp"

namespace facetlab {

/// Two bridge chains on the same endpoints driven by shared (site, coin) draws.
///
/// The upper chain keeps at least `inversion_floor` inversions (the area
/// constraint seen from inside the bridge); both chains stay weakly below
/// the chord [a, b]. The coin is the target corner orientation: 1 asks for
/// the up corner RD, 0 for the down corner DR.
class MonotoneCoupling {
 public:
  MonotoneCoupling(const Bridge& start, std::int64_t inversion_floor, RngStream rng);

  const Bridge& upper() const { return upper_; }
  const Bridge& lower() const { return lower_; }
  Point a() const { return upper_.a(); }
  Point b() const { return upper_.b(); }
  std::int64_t inversion_floor() const { return floor_; }
  std::int64_t upper_inversions() const { return upper_inv_; }
  RngStream& rng() { return rng_; }
  std::uint64_t steps() const { return steps_; }

  /// One step with a fresh (site, coin) draw.
  void step();
  /// One step with the given draw; site in [1, length-1].
  void step(std::size_t site, bool coin);

  bool dominated() const { return dominates(upper_, lower_); }

 private:
  bool apply(Bridge& br, std::size_t site, bool coin, bool upper);

  Bridge upper_;
  Bridge lower_;
  std::int64_t floor_;
  std::int64_t upper_inv_;
  RngStream rng_;
  std::uint64_t steps_ = 0;
};

void coupled_step(MonotoneCoupling& coupling);
void coupled_step(MonotoneCoupling& coupling, std::size_t site, bool coin);

}  // namespace facetlab
