#include "doctest.h"

#include <string>
#include <vector>

#include "facetlab/errors.hpp"
#include "facetlab/path.hpp"
#include "facetlab/rng.hpp"
#include "facetlab/samplers.hpp"

using namespace facetlab;

namespace {

LatticePath random_path(RngStream& rng, std::size_t len) {
  StepSequence s;
  std::int64_t k = 0;
  for (std::size_t i = 0; i < len; ++i) {
    const bool d = rng.coin();
    s.push_back(d ? Step::Down : Step::Right);
    k += d;
  }
  return LatticePath(k, std::move(s));
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::AuditFailure;
}

}  // namespace

TEST_SUITE("path") {

TEST_CASE("area by column sums") {
  CHECK(LatticePath::parse("0:R").area() == 0);
  CHECK(LatticePath::parse("2:RDRD").area() == 3);
  CHECK(LatticePath::parse("3:RRRDDD").area() == 9);
  CHECK(LatticePath::square(3).area() == 9);
}

TEST_CASE("excess area") {
  CHECK(excess_area(LatticePath::square(3), ModelParams(0.3, 3)) == 0);
  CHECK(excess_area(LatticePath::parse("2:RDRD"), ModelParams(0.3, 1)) == 2);
  CHECK(excess_area(LatticePath::parse("0:R"), ModelParams(0.3, 1)) == -1);
}

TEST_CASE("model parameters are validated") {
  CHECK(code_of([] { ModelParams(0.5, 1); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { ModelParams(0.0, 1); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { ModelParams(0.3, 0); }) == ErrorCode::InvalidParams);
}

TEST_CASE("path ends on the x-axis") {
  CHECK(code_of([] { LatticePath(1, StepSequence("RR")); }) == ErrorCode::InvalidPath);
  const auto p = LatticePath::parse("2:RDRD");
  CHECK(p.end_x() == 2);
  CHECK(p.length() == 4);
  CHECK(p.encode() == "2:RDRD");
}

TEST_CASE("cached area matches the shoelace audit") {
  RngStream rng(3, 0);
  for (int i = 0; i < 500; ++i) {
    const auto p = random_path(rng, rng.uniform_below(200));
    CHECK(p.area() == p.recompute_area());
    CHECK(static_cast<std::int64_t>(p.length()) == p.end_x() + p.start_height());
  }
}

TEST_CASE("restriction to a bridge") {
  const auto sq = LatticePath::square(3);
  CHECK(restrict_to_bridge(sq, {0, 3}, {3, 3}).steps().to_string() == "RRR");
  CHECK(restrict_to_bridge(sq, {3, 3}, {3, 3}).length() == 0);
  CHECK(restrict_to_bridge(LatticePath::parse("2:RDRD"), {1, 2}, {2, 1}).steps().to_string() == "DR");
  CHECK(code_of([&] { restrict_to_bridge(sq, {1, 1}, {3, 0}); }) == ErrorCode::PointNotOnPath);
}

TEST_CASE("bridge endpoints are validated") {
  CHECK(code_of([] { Bridge({0, 0}, {1, 1}, StepSequence("R")); }) == ErrorCode::BridgeEndpointsInvalid);
  CHECK(code_of([] { Bridge({0, 1}, {1, 0}, StepSequence("RR")); }) == ErrorCode::BridgeEndpointsInvalid);
}

TEST_CASE("domination by column heights") {
  const Point a{0, 2};
  const Point b{2, 0};
  const Bridge top(a, b, StepSequence("RRDD"));
  const Bridge bottom(a, b, StepSequence("DDRR"));
  const Bridge stair(a, b, StepSequence("RDRD"));
  CHECK(dominates(top, bottom));
  CHECK(dominates(stair, stair));
  CHECK_FALSE(dominates(stair, top));
  CHECK(code_of([&] { dominates(top, Bridge({0, 3}, b, StepSequence("DRRDD"))); }) == ErrorCode::EndpointMismatch);
}

TEST_CASE("corner flips") {
  auto f = corner_flip(LatticePath::parse("1:RD"), 1);
  REQUIRE(f);
  CHECK(f->path.encode() == "1:DR");
  CHECK(f->area_delta == -1);
  CHECK_FALSE(corner_flip(LatticePath::parse("2:DD"), 1));
  const auto p = LatticePath::parse("2:DRRD");
  CHECK_FALSE(corner_flip(p, 2));
  f = corner_flip(p, 1);
  REQUIRE(f);
  CHECK(f->path.encode() == "2:RDRD");
  CHECK(f->area_delta == 1);
  CHECK(code_of([&] { corner_flip(p, 4); }) == ErrorCode::IndexOutOfRange);
  CHECK(code_of([&] { corner_flip(p, 0); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("vertical step insertion") {
  const auto sq = LatticePath::square(3);
  CHECK(surg(sq, std::vector<std::size_t>{}) == sq);
  const auto one = surg(LatticePath::parse("0:R"), std::vector<std::size_t>{0});
  CHECK(one.encode() == "1:DR");
  CHECK(one.area() == 0);
  const auto s = surg(sq, std::vector<std::size_t>{0});
  CHECK(s.encode() == "4:DRRRDDD");
  CHECK(s.area() == 9);
  CHECK(s.length() == sq.length() + 1);
  CHECK(code_of([&] { surg(sq, std::vector<std::size_t>{3}); }) == ErrorCode::NotAHorizontalStep);
}

TEST_CASE("in-place edits keep the cached area exact") {
  RngStream rng(5, 0);
  for (int i = 0; i < 300; ++i) {
    auto p = random_path(rng, 1 + rng.uniform_below(150));
    for (int k = 0; k < 40; ++k) {
      const std::int64_t before = p.area();
      switch (rng.uniform_below(3)) {
        case 0: {
          if (p.length() < 2) break;
          const std::size_t v = 1 + rng.uniform_below(p.length() - 1);
          const int expect = p.corner_delta(v);
          CHECK(p.flip_corner_in_place(v) == expect);
          break;
        }
        case 1: {
          const std::size_t slot = rng.uniform_below(p.length() + 1);
          const Step s = rng.coin() ? Step::Down : Step::Right;
          const auto g = p.insertion_gain(slot, s);
          CHECK(p.insert_step(slot, s) == g);
          break;
        }
        default: {
          if (p.length() == 0) break;
          const std::size_t pos = rng.uniform_below(p.length());
          const auto l = p.erasure_loss(pos);
          CHECK(p.erase_step(pos) == l);
          break;
        }
      }
      REQUIRE(p.area() == p.recompute_area());
      (void)before;
    }
  }
}

TEST_CASE("step sequence edits match string edits") {
  RngStream rng(9, 0);
  for (int i = 0; i < 200; ++i) {
    std::string ref;
    StepSequence s;
    for (int k = 0; k < 300; ++k) {
      if (ref.empty() || rng.uniform() < 0.6) {
        const std::size_t pos = rng.uniform_below(ref.size() + 1);
        const bool d = rng.coin();
        ref.insert(ref.begin() + static_cast<std::ptrdiff_t>(pos), d ? 'D' : 'R');
        s.insert(pos, d ? Step::Down : Step::Right);
      } else {
        const std::size_t pos = rng.uniform_below(ref.size());
        ref.erase(pos, 1);
        s.erase(pos);
      }
    }
    REQUIRE(s.to_string() == ref);
    REQUIRE(StepSequence(ref) == s);
  }
}

TEST_CASE("vertex lookup") {
  const auto p = LatticePath::parse("2:RDRD");
  CHECK(p.vertex(0) == Point{0, 2});
  CHECK(p.vertex(2) == Point{1, 1});
  CHECK(p.index_of({2, 1}) == 3u);
  CHECK_FALSE(p.index_of({0, 0}));
}

}
