#include "facetlab/samplers.hpp"

#include <bit>
#include <cmath>

#include "facetlab/errors.hpp"

namespace facetlab {

std::uint64_t sample_geometric(double r, RngStream& rng) {
  if (r <= 0.0) return 0;
  const double u = rng.uniform_open();
  return static_cast<std::uint64_t>(std::floor(std::log(u) / std::log(r)));
}

LatticePath sample_free(const ModelParams& params, RngStream& rng) {
  const std::uint64_t n = sample_geometric(2.0 * params.lambda(), rng);
  StepSequence s;
  std::int64_t downs = 0;
  std::uint64_t word = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    if ((i & 63) == 0) word = rng.next_u64();
    const bool d = (word >> (63 - (i & 63))) & 1U;
    downs += d;
    s.push_back(d ? Step::Down : Step::Right);
  }
  return LatticePath(downs, std::move(s));
}

Bridge sample_bridge_uniform(Point a, Point b, RngStream& rng) {
  if (!bridge_space_nonempty(a, b)) {
    throw Error(ErrorCode::EmptyBridgeSpace, "no down-right path between the endpoints");
  }
  std::uint64_t r = static_cast<std::uint64_t>(b.x - a.x);
  std::uint64_t d = static_cast<std::uint64_t>(a.y - b.y);
  StepSequence s;
  while (r + d > 0) {
    if (rng.uniform_below(r + d) < r) {
      s.push_back(Step::Right);
      --r;
    } else {
      s.push_back(Step::Down);
      --d;
    }
  }
  return Bridge(a, b, std::move(s));
}

bool below_chord(const Bridge& bridge) {
  const Point a = bridge.a();
  const Point b = bridge.b();
  Point cur = a;
  const auto& s = bridge.steps();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.is_down(i)) {
      --cur.y;
    } else {
      ++cur.x;
      if (above_chord(a, b, cur) > 0) return false;
    }
  }
  return true;
}

BelowChordSampler::BelowChordSampler(Point a, Point b, RngStream& rng)
    : BelowChordSampler(a, b, rng, Options{}) {}

BelowChordSampler::BelowChordSampler(Point a, Point b, RngStream& rng, Options opts)
    : a_(a), b_(b), opts_(opts) {
  if (!bridge_space_nonempty(a, b)) {
    throw Error(ErrorCode::EmptyBridgeSpace, "no down-right path between the endpoints");
  }
  state_ = Bridge::lowest(a, b);
  if (opts_.calibration == 0) return;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < opts_.calibration; ++i) {
    if (below_chord(sample_bridge_uniform(a, b, rng))) ++hits;
  }
  rate_ = static_cast<double>(hits) / static_cast<double>(opts_.calibration);
  fallback_ = rate_ < opts_.min_rate;
}

Bridge BelowChordSampler::draw(RngStream& rng) {
  if (!fallback_) {
    for (;;) {
      Bridge br = sample_bridge_uniform(a_, b_, rng);
      if (below_chord(br)) return br;
    }
  }
  const std::size_t n = state_.length();
  if (n < 2) return state_;
  auto& s = state_.mutable_steps();
  const std::uint64_t proposals = opts_.fallback_sweeps * n;
  for (std::uint64_t k = 0; k < proposals; ++k) {
    const std::size_t v = 1 + rng.uniform_below(n - 1);
    const bool d0 = s.is_down(v - 1);
    const bool d1 = s.is_down(v);
    if (d0 == d1) continue;
    if (d0 && !d1) {
      // DR -> RD raises the vertex to (x+1, y+1) relative to its DR position.
      const Point p = state_.a();
      const auto downs = static_cast<std::int64_t>(s.count_down(0, v - 1));
      const Point nv{p.x + static_cast<std::int64_t>(v - 1) - downs + 1, p.y - downs};
      if (above_chord(a_, b_, nv) > 0) continue;
    }
    s.toggle_pair(v - 1);
  }
  return state_;
}

Bridge sample_bridge_below(Point a, Point b, RngStream& rng) {
  BelowChordSampler sampler(a, b, rng);
  return sampler.draw(rng);
}

RejectionDraw sample_conditioned_rejection(const ModelParams& params, RngStream& rng,
                                           std::uint64_t max_attempts) {
  const std::int64_t need = params.area_threshold();
  for (std::uint64_t k = 1; k <= max_attempts; ++k) {
    LatticePath p = sample_free(params, rng);
    if (p.area() >= need) return RejectionDraw{std::move(p), k};
  }
  throw Error(ErrorCode::AcceptanceBudgetExceeded,
              "rejection sampler exhausted " + std::to_string(max_attempts) + " attempts");
}

LatticePath path_from_pattern(std::size_t len, std::uint64_t pattern) {
  StepSequence s;
  for (std::size_t i = 0; i < len; ++i) {
    s.push_back(((pattern >> (len - 1 - i)) & 1U) ? Step::Down : Step::Right);
  }
  const std::uint64_t mask = len == 0 ? 0 : (len >= 64 ? ~0ULL : ((1ULL << len) - 1));
  return LatticePath(std::popcount(pattern & mask), std::move(s));
}

LatticePath PathEnumeration::iterator::operator*() const { return path_from_pattern(len_, pattern_); }

PathEnumeration::iterator& PathEnumeration::iterator::operator++() {
  if (++pattern_ >> len_) {
    ++len_;
    pattern_ = 0;
  }
  return *this;
}

PathEnumeration::PathEnumeration(std::size_t max_len) : max_len_(max_len) {
  if (max_len > kMaxLength) {
    throw Error(ErrorCode::BudgetExceeded, "enumeration limited to length " +
                                               std::to_string(kMaxLength));
  }
}

PathEnumeration enumerate_paths(std::size_t max_len) { return PathEnumeration(max_len); }

}  // namespace facetlab
