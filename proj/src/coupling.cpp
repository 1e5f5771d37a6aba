#include "facetlab/coupling.hpp"

#include <cassert>

#include "facetlab/errors.hpp"
#include "facetlab/samplers.hpp"

namespace facetlab {

MonotoneCoupling::MonotoneCoupling(const Bridge& start, std::int64_t inversion_floor, RngStream rng)
    : upper_(start), lower_(start), floor_(inversion_floor), upper_inv_(start.inversions()), rng_(rng) {
  if (!below_chord(start)) {
    throw Error(ErrorCode::InvalidParams, "coupling must start weakly below the chord");
  }
  if (upper_inv_ < floor_) throw Error(ErrorCode::InvalidParams, "start bridge violates the floor");
}

bool MonotoneCoupling::apply(Bridge& br, std::size_t site, bool coin, bool upper) {
  StepSequence& s = br.mutable_steps();
  const bool d0 = s.is_down(site - 1);
  const bool d1 = s.is_down(site);
  if (d0 == d1) return false;
  const bool up_corner = !d0 && d1;
  if (up_corner == coin) return false;
  if (coin) {
    // DR -> RD moves the vertex one unit right of the corner's upper end.
    const auto downs = static_cast<std::int64_t>(s.count_down(0, site - 1));
    const Point v{br.a().x + static_cast<std::int64_t>(site - 1) - downs + 1, br.a().y - downs};
    if (above_chord(br.a(), br.b(), v) > 0) return false;
    s.toggle_pair(site - 1);
    if (upper) ++upper_inv_;
    return true;
  }
  if (upper) {
    if (upper_inv_ - 1 < floor_) return false;
    --upper_inv_;
  }
  s.toggle_pair(site - 1);
  return true;
}

void MonotoneCoupling::step(std::size_t site, bool coin) {
  ++steps_;
  if (upper_.length() < 2) return;
  if (site < 1 || site >= upper_.length()) {
    throw Error(ErrorCode::IndexOutOfRange, "coupling site must be interior");
  }
  apply(upper_, site, coin, true);
  apply(lower_, site, coin, false);
#ifndef NDEBUG
  assert(dominated());
#endif
}

void MonotoneCoupling::step() {
  const std::size_t n = upper_.length();
  if (n < 2) {
    ++steps_;
    return;
  }
  const std::size_t site = 1 + rng_.uniform_below(n - 1);
  const bool coin = rng_.coin();
  step(site, coin);
}

void coupled_step(MonotoneCoupling& coupling) { coupling.step(); }

void coupled_step(MonotoneCoupling& coupling, std::size_t site, bool coin) {
  coupling.step(site, coin);
}

}  // namespace facetlab
