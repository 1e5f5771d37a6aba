#include "doctest.h"

#include <algorithm>
#include <bit>
#include <limits>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "facetlab/chain.hpp"
#include "facetlab/errors.hpp"
#include "facetlab/oracle.hpp"
#include "facetlab/samplers.hpp"
#include "facetlab/sectors.hpp"
#include "facetlab/stats.hpp"

using namespace facetlab;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::AuditFailure;
}

// Shoelace area of a closed polygon, doubled.
std::int64_t twice_polygon_area(const std::vector<Point>& poly) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % poly.size()];
    s += p.x * q.y - q.x * p.y;
  }
  return s;
}

// Excess of the region enclosed by [0, x], the bridge and [y, 0] over the
// triangle (0, x, y); clockwise polygons give positive area here.
double polygon_excess(const Bridge& b) {
  std::vector<Point> poly{{0, 0}};
  for (const auto& v : b.vertices()) poly.push_back(v);
  const std::vector<Point> tri{{0, 0}, b.a(), b.b()};
  return -static_cast<double>(twice_polygon_area(poly) - twice_polygon_area(tri)) / 2.0;
}

// Distance from every vertex to the boundary of the convex hull of the bridge
// and the origin, with hull edges found by the all-pairs test.
double hull_deviation(const Bridge& b) {
  std::vector<Point> pts{{0, 0}};
  for (const auto& v : b.vertices()) pts.push_back(v);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<std::pair<Point, Point>> edges;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      bool edge = true;
      for (const Point& r : pts) {
        if (cross(pts[i], pts[j], r) > 0) {
          edge = false;
          break;
        }
      }
      if (edge) edges.emplace_back(pts[i], pts[j]);
    }
  }
  double worst = 0.0;
  for (const Point& v : b.vertices()) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& [p, q] : edges) d = std::min(d, segment_distance(v, p, q));
    worst = std::max(worst, d);
  }
  return worst;
}

std::vector<Bridge> all_bridges(Point a, Point b) {
  const auto r = static_cast<std::size_t>(b.x - a.x);
  const auto d = static_cast<std::size_t>(a.y - b.y);
  std::vector<Bridge> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << (r + d)); ++m) {
    if (static_cast<std::size_t>(std::popcount(m)) != d) continue;
    StepSequence s;
    for (std::size_t i = 0; i < r + d; ++i) s.push_back((m >> (r + d - 1 - i)) & 1U ? Step::Down : Step::Right);
    out.emplace_back(a, b, std::move(s));
  }
  return out;
}

// Path R^{n-a} D^a R^a D^{n-a}: the square with its corner pushed in by a.
LatticePath notched_square(std::int64_t n, std::int64_t a) {
  StepSequence s;
  for (std::int64_t i = 0; i < n - a; ++i) s.push_back(Step::Right);
  for (std::int64_t i = 0; i < a; ++i) s.push_back(Step::Down);
  for (std::int64_t i = 0; i < a; ++i) s.push_back(Step::Right);
  for (std::int64_t i = 0; i < n - a; ++i) s.push_back(Step::Down);
  return LatticePath(n, std::move(s));
}

// Lattice path hugging the quarter circle of radius r from outside.
LatticePath circle_path(std::int64_t r) {
  StepSequence s;
  std::int64_t y = r;
  for (std::int64_t x = 0; x < r; ++x) {
    const auto h = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(r * r - x * x))));
    while (y > h) {
      s.push_back(Step::Down);
      --y;
    }
    s.push_back(Step::Right);
  }
  while (y > 0) {
    s.push_back(Step::Down);
    --y;
  }
  return LatticePath(r, std::move(s));
}

struct ExactSampler {
  ExactTable table;
  std::vector<double> cdf;

  ExactSampler(const ModelParams& params, std::size_t truncation) : table(exact_conditional(params, truncation)) {
    double c = 0.0;
    for (const auto& e : table.entries) cdf.push_back(c += e.probability);
  }
  LatticePath draw(RngStream& rng) const {
    const double u = rng.uniform() * cdf.back();
    const auto i = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    const auto& e = table.entries[std::min(i, cdf.size() - 1)];
    return path_from_pattern(e.length, e.pattern);
  }
};

using Key = std::pair<std::size_t, std::int64_t>;

Key key_of(const LatticePath& p) {
  return {std::min<std::size_t>(p.length(), 14) * 32 + static_cast<std::size_t>(std::min<std::int64_t>(p.start_height(), 6)),
          std::min<std::int64_t>(p.area(), 12)};
}

std::map<Key, double> exact_key_law(const ExactSampler& s) {
  std::map<Key, double> out;
  for (const auto& e : s.table.entries) out[key_of(path_from_pattern(e.length, e.pattern))] += e.probability;
  double z = 0.0;
  for (const auto& [k, p] : out) z += p;
  for (auto& [k, p] : out) p /= z;
  return out;
}

// P(no two selected indices among 1..m are closer than gap) for i.i.d. Bernoulli(p).
double separation_probability(std::size_t m, double p, std::size_t gap) {
  // w[d]: mass with distance d (capped at gap) from the last selection.
  std::vector<double> w(gap + 1, 0.0);
  w[gap] = 1.0;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> nx(gap + 1, 0.0);
    for (std::size_t d = 0; d <= gap; ++d) {
      const std::size_t cur = std::min(gap, d + 1);
      nx[cur] += w[d] * (1.0 - p);
      if (cur >= gap) nx[0] += w[d] * p;
    }
    w = nx;
  }
  double s = 0.0;
  for (double x : w) s += x;
  return s;
}

}  // namespace

TEST_SUITE("sectors") {

TEST_CASE("cone endpoints") {
  const auto sq = LatticePath::square(3);
  const auto e = cone_endpoints(sq, Cone(40 * kDeg, 50 * kDeg));
  CHECK(e.x == Point{3, 3});
  CHECK(e.y == Point{3, 3});
  CHECK(e.length == 0);
  const auto all = cone_endpoints(sq, Cone(0.0, std::numbers::pi / 2));
  CHECK(all.x == Point{0, 3});
  CHECK(all.y == Point{3, 0});
  CHECK(all.length == 6);
  CHECK(code_of([] { cone_endpoints(LatticePath::parse("0:RR"), Cone(0.5, 1.0)); }) == ErrorCode::EmptyIntersection);
  CHECK(code_of([] { Cone(0.5, 0.5); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { Cone(-0.1, 0.5); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { Cone(0.1, 2.0); }) == ErrorCode::InvalidParams);
}

TEST_CASE("bad angles") {
  const Cone quadrant(0.0, std::numbers::pi / 2);
  CHECK(bad_angle(LatticePath::square(4), quadrant, 0.1) == BadAngle::Neither);
  const auto flat = LatticePath::parse("1:RRRRRRRRRRD");
  CHECK(chord_angle({0, 1}, {10, 0}) == doctest::Approx(std::atan(0.1)));
  CHECK(bad_angle(flat, quadrant, 0.1) == BadAngle::Plus);
  CHECK(bad_angle(LatticePath::parse("10:DDDDDDDDDRD"), quadrant, 0.1) == BadAngle::Minus);
  CHECK(bad_angle(LatticePath::square(4), quadrant, 0.0) == BadAngle::Neither);
  CHECK(bad_angle(flat, quadrant, 0.0) == BadAngle::Neither);
  CHECK(bad_angle(LatticePath::parse("0:RRR"), quadrant, 0.0) == BadAngle::Plus);
  CHECK(bad_angle(LatticePath::parse("3:DDD"), quadrant, 0.0) == BadAngle::Minus);
  CHECK(code_of([] { bad_angle(LatticePath::square(3), Cone(40 * kDeg, 50 * kDeg), 0.1); }) ==
        ErrorCode::DegenerateChord);
}

TEST_CASE("area capture events") {
  const Bridge corner({0, 4}, {4, 0}, StepSequence("RRRRDDDD"));
  const Bridge stairs({0, 4}, {4, 0}, StepSequence("RDRDRDRD"));
  CHECK(twice_excess_over_chord(corner) == 16);
  CHECK(twice_excess_over_chord(stairs) == 4);
  const auto g = gac_check(corner, 0.5);
  CHECK(g.excess == 8.0);
  CHECK(g.threshold == doctest::Approx(0.5 * std::pow(4 * std::sqrt(2.0), 1.5)));
  CHECK(g.threshold == doctest::Approx(6.727).epsilon(1e-3));
  CHECK(g.holds);
  const auto s = gac_check(stairs, 0.5);
  CHECK(s.excess == 2.0);
  CHECK_FALSE(s.holds);
  CHECK(gac_check(corner, 0.0).holds);
  CHECK(gac_check(stairs, 0.0).holds);
  CHECK_FALSE(gac_check(Bridge({0, 2}, {2, 0}, StepSequence("DDRR")), 0.0).holds);

  const auto lg = log_gac_check(corner, 0.5);
  CHECK(lg.threshold == doctest::Approx(8.86).epsilon(1e-3));
  CHECK_FALSE(lg.holds);
  CHECK(log_gac_check(corner, 0.0).holds == gac_check(corner, 0.0).holds);
  CHECK(log_gac_check(stairs, 0.0).holds == gac_check(stairs, 0.0).holds);
  CHECK(lg.threshold / g.threshold == doctest::Approx(std::sqrt(std::log(4 * std::sqrt(2.0)))));

  const auto p = LatticePath::square(4);
  CHECK(gac_check(p, {0, 4}, {4, 0}, 0.5).excess == 8.0);
  CHECK(code_of([&] { gac_check(p, {4, 0}, {0, 4}, 0.5); }) == ErrorCode::NotConnected);
  CHECK(code_of([&] { log_gac_check(p, {1, 1}, {4, 0}, 0.5); }) == ErrorCode::NotConnected);
  CHECK(code_of([&] { log_sid_check(p, {1, 1}, {4, 0}, 0.5); }) == ErrorCode::NotConnected);
}

TEST_CASE("inward deviation") {
  const Bridge corner({0, 4}, {4, 0}, StepSequence("RRRRDDDD"));
  const auto c = log_sid_check(corner, 0.1);
  CHECK(c.deviation == 0.0);
  CHECK_FALSE(c.holds);
  CHECK(log_sid_check(corner, 0.0).holds);
  const Bridge stairs({0, 4}, {4, 0}, StepSequence("RDRDRDRD"));
  const auto s = log_sid_check(stairs, 0.1);
  CHECK(s.deviation == doctest::Approx(std::sqrt(0.5)));
  CHECK(s.witness == Point{1, 3});
  CHECK(s.threshold == doctest::Approx(0.1 * std::sqrt(4 * std::sqrt(2.0)) * std::sqrt(std::log(4 * std::sqrt(2.0)))));
}

TEST_CASE("events agree with polygon oracles on all short bridges") {
  std::size_t checked = 0;
  for (const Point a : {Point{0, 6}, Point{1, 5}, Point{2, 9}, Point{3, 3}}) {
    for (std::int64_t r = 0; r <= 10; ++r) {
      for (std::int64_t d = 0; r + d <= 10 && d <= a.y; ++d) {
        const Point b{a.x + r, a.y - d};
        for (const auto& br : all_bridges(a, b)) {
          const double ex = polygon_excess(br);
          REQUIRE(gac_check(br, 0.05).excess == ex);
          REQUIRE(log_gac_check(br, 0.05).excess == ex);
          REQUIRE(log_sid_check(br, 0.05).deviation == doctest::Approx(hull_deviation(br)).epsilon(1e-12));
          ++checked;
        }
      }
    }
  }
  CHECK(checked > 5000);
}

TEST_CASE("deviation matches the hull oracle on random bridges") {
  RngStream rng(51, 0);
  for (int i = 0; i < 2000; ++i) {
    const Point a{static_cast<std::int64_t>(rng.uniform_below(5)), 12 + static_cast<std::int64_t>(rng.uniform_below(5))};
    const auto r = static_cast<std::int64_t>(rng.uniform_below(13));
    const Point b{a.x + r, a.y - static_cast<std::int64_t>(rng.uniform_below(13))};
    const auto br = sample_bridge_uniform(a, b, rng);
    REQUIRE(log_sid_check(br, 0.05).deviation == doctest::Approx(hull_deviation(br)).epsilon(1e-12));
  }
}

TEST_CASE("sector grid") {
  const auto g = build_sector_grid(1000, 0.5, 2.0 / 27.0);
  CHECK(g.theta() == doctest::Approx(0.09525).epsilon(1e-4));
  CHECK(g.m() == 16);
  CHECK(static_cast<double>(g.m()) * g.theta() <= std::numbers::pi / 2);
  CHECK(g.s3() == doctest::Approx(std::pow(1000.0, 2.0 / 27.0)));
  CHECK(g.s1() == doctest::Approx(g.s3() - 1.0));
  CHECK(g.s2() == doctest::Approx(0.125 * g.s3()));
  const Cone a = g.sector(3);
  CHECK(a.angle_lo == doctest::Approx(2 * g.theta()));
  CHECK(a.angle_hi == doctest::Approx(3 * g.theta()));
  const Cone b = g.inner(3);
  CHECK(b.angle_lo == doctest::Approx(2.25 * g.theta()));
  CHECK(b.angle_hi == doctest::Approx(2.75 * g.theta()));
  CHECK(code_of([&] { g.sector(0); }) == ErrorCode::IndexOutOfRange);
  CHECK(code_of([&] { g.sector(17); }) == ErrorCode::IndexOutOfRange);
  CHECK(code_of([] { build_sector_grid(1000, 1e3, 2.0 / 27.0); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { build_sector_grid(1, 0.5, 2.0 / 27.0); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { build_sector_grid(100, 0.5, 0.7); }) == ErrorCode::InvalidParams);
  double prev = 1.0;
  for (std::int64_t n : {1000LL, 100000LL, 10000000LL, 1000000000LL, 100000000000LL}) {
    const auto h = build_sector_grid(n, 0.5, 2.0 / 27.0);
    const double gap = std::numbers::pi / 2 - static_cast<double>(h.m()) * h.theta();
    CHECK(gap >= 0.0);
    CHECK(gap < h.theta());
    CHECK(h.theta() < prev);
    prev = h.theta();
  }
  CHECK(std::numbers::pi / 2 - [] {
    const auto h = build_sector_grid(100000000000LL, 0.5, 2.0 / 27.0);
    return static_cast<double>(h.m()) * h.theta();
  }() < 0.01);
}

TEST_CASE("favourable sectors") {
  const auto g = build_sector_grid(1000, 0.5, 2.0 / 27.0);
  const double thr = favourable_threshold(g, {});
  CHECK(thr == doctest::Approx(std::pow(0.5, 2.0 / 3.0) * 10.0 * std::pow(std::log(1000.0), 2.0 / 3.0)));
  for (bool f : favourable_all(LatticePath::square(1000), g)) CHECK_FALSE(f);

  SectorOptions zero;
  zero.phi_override = 0.0;
  const auto notch = notched_square(1000, 65);
  const auto every = favourable_all(notch, g, zero);
  for (std::size_t j = 1; j <= g.m(); ++j) {
    const bool meets = cone_window(notch, g.sector(j).angle_lo, g.sector(j).angle_hi).has_value();
    CHECK(every[j - 1] == meets);
  }

  // Inward depth 65 / sqrt(2) is about twice the threshold, at argument pi/4.
  REQUIRE(local_roughness(notch, {935, 935}) >= 2.0 * thr - 0.5);
  const auto fav = favourable_all(notch, g);
  std::vector<std::size_t> hits;
  for (std::size_t j = 1; j <= g.m(); ++j) {
    if (fav[j - 1]) hits.push_back(j);
    CHECK(fav[j - 1] == favourable(notch, g, j));
  }
  const auto expected = static_cast<std::size_t>(std::ceil(std::numbers::pi / 4 / g.theta()));
  CHECK(hits == std::vector<std::size_t>{expected});
  CHECK(expected == 9);
}

TEST_CASE("moderate boundary turning") {
  const auto g = build_sector_grid(1000, 0.5, 2.0 / 27.0);
  const auto circle = circle_path(1000);
  const auto r = mbt_set(circle, g);
  CHECK(r.members.size() == g.m());
  CHECK(r.confined);
  CHECK(r.soft_check);

  const std::int64_t n = 1000000;
  const auto h = build_sector_grid(n, 0.5, 2.0 / 27.0);
  const auto sq = LatticePath::square(n);
  const auto s = mbt_set(sq, h);
  const auto corner = static_cast<std::size_t>(std::ceil(std::numbers::pi / 4 / h.theta()));
  // Direct computation: tangents turn only across pi/4, by pi/2.
  std::vector<std::size_t> expected;
  for (std::size_t j = 1; j <= h.m(); ++j) {
    const double turn = j == corner ? std::numbers::pi / 2 : 0.0;
    if (turn <= 10.0 * std::numbers::pi / static_cast<double>(h.m())) expected.push_back(j);
  }
  CHECK(s.members == expected);
  CHECK(s.members.size() == h.m() - 1);
  CHECK(s.soft_check);

  const auto z = majorant_at_angle(least_concave_majorant(LatticePath::square(4)), std::numbers::pi / 4);
  REQUIRE(z);
  CHECK(z->x == doctest::Approx(4.0));
  CHECK(z->y == doctest::Approx(4.0));
  CHECK_FALSE(majorant_at_angle(least_concave_majorant(LatticePath::parse("0:RR")), 0.3));

  const auto one = build_sector_grid(1000, 5.0, 2.0 / 27.0);
  REQUIRE(one.m() == 1);
  const auto t = mbt_set(circle, one);
  CHECK(t.members.size() <= 1);
  CHECK(t.soft_check);
}

TEST_CASE("confinement") {
  CHECK(confined(LatticePath::square(10), 10, 3.0, 0.15));
  CHECK_FALSE(confined(LatticePath::square(10), 10, 1.2, 0.15));
  CHECK_FALSE(confined(LatticePath::parse("10:RRRRRRRRRRRRRRRRRRRRRRRRRRRRRRRRRRRRRRRRRDDDDDDDDDD"), 10, 3.0, 0.15));
  CHECK_FALSE(confined(LatticePath::parse("1:DRRRRRR"), 2, 3.0, 0.15));
}

TEST_CASE("resampling an empty sector is a no-op") {
  const ModelParams params(0.3, 40);
  const auto g = build_sector_grid(40, 0.5, 2.0 / 27.0);
  // Flat path: every vertex has argument below the first inner sector's edge
  // except the start, which sits at pi/2.
  StepSequence s;
  for (int i = 0; i < 1700; ++i) s.push_back(Step::Right);
  s.push_back(Step::Down);
  ChainState st(params, LatticePath(1, s), RngStream(52, 0));
  const auto before = st.path();
  const auto r = res_j(st, g, 3, {});
  CHECK(r.empty_sector);
  CHECK_FALSE(r.acted);
  CHECK(st.path() == before);
}

TEST_CASE("resampling preserves the conditioned law") {
  const ModelParams params(0.25, 2);
  const ExactSampler ex(params, 22);
  REQUIRE(ex.table.neglected_bound < 1e-4);
  const auto law = exact_key_law(ex);
  const auto g = build_sector_grid(2, 0.5, 2.0 / 27.0);
  REQUIRE(g.m() >= 2);
  RngStream rng(53, 0);
  const int n = 400000;
  std::map<Key, std::uint64_t> before;
  std::vector<std::map<Key, std::uint64_t>> after(g.m() + 1);
  std::size_t acted = 0;
  for (int i = 0; i < n; ++i) {
    const auto p = ex.draw(rng);
    ++before[key_of(p)];
    for (std::size_t j = 1; j <= g.m(); ++j) {
      ChainState st(params, p, rng.child(static_cast<std::uint64_t>(i) * 16 + j));
      const auto r = res_j(st, g, j, {});
      acted += r.acted;
      ++after[j][key_of(st.path())];
    }
    ChainState st(params, p, rng.child(static_cast<std::uint64_t>(i) * 16));
    full_res(st, g, 1.0, {});
    ++after[0][key_of(st.path())];
  }
  CHECK(acted > 20000);
  const double noise = total_variation(normalise(before), law);
  CHECK(noise < 0.01);
  for (std::size_t j = 1; j <= g.m(); ++j) CHECK(total_variation(normalise(after[j]), law) < 0.01);
  CHECK(total_variation(normalise(after[0]), law) < 0.02);
}

TEST_CASE("full resampling with zero selection is the identity") {
  const ModelParams params(0.3, 64);
  auto st = init_chain(params, RngStream(54, 0));
  RunOptions o;
  o.sweeps = 200;
  o.interior_fraction = 0.5;
  o.indel_fraction = 0.5;
  run(st, o);
  const auto before = st.path();
  const auto g = build_sector_grid(64, 0.5, 2.0 / 27.0);
  const auto r = full_res(st, g, 0.0, {});
  CHECK(st.path() == before);
  CHECK(r.acted == 0);
  CHECK(r.sectors.size() == g.m());
  CHECK(r.stages.size() == g.m() + 1);
  for (const auto& s : r.sectors) CHECK_FALSE(s.selected);
}

TEST_CASE("non-interference of distant sectors") {
  const std::int64_t n = 5000;
  const ModelParams params(0.3, n);
  const auto g = build_sector_grid(n, 0.5, 2.0 / 27.0);
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  std::size_t successes = 0;
  for (int rep = 0; rep < 10; ++rep) {
    ChainState st(params, circle_path(n * 6 / 5), RngStream(55, static_cast<std::uint64_t>(rep)));
    SectorOptions o;
    o.eta = 0.01;
    const auto r = full_res(st, g, 1.0, o);
    checks += r.interference_checks;
    violations += r.interference_violations;
    successes += r.successes;
    REQUIRE(st.area() >= n * n);
  }
  CHECK(checks > 0);
  CHECK(violations == 0);
  CHECK(successes > 0);
}

TEST_CASE("selected sectors are separated with the Bernoulli probability") {
  const std::int64_t n = 1000;
  const ModelParams params(0.3, n);
  const auto g = build_sector_grid(n, 0.5, 2.0 / 27.0);
  const auto gap = static_cast<std::size_t>(std::ceil(g.s3()));
  const double expected = separation_probability(g.m(), 1.0 / g.s3(), gap);
  const int runs = 1000;
  int separated = 0;
  double selected = 0.0;
  for (int i = 0; i < runs; ++i) {
    ChainState st(params, LatticePath::square(n), RngStream(56, static_cast<std::uint64_t>(i)));
    const auto r = full_res(st, g);
    std::vector<std::size_t> js;
    for (const auto& s : r.sectors) {
      if (s.selected) js.push_back(s.j);
    }
    selected += static_cast<double>(js.size());
    bool ok = true;
    for (std::size_t k = 1; k < js.size(); ++k) ok = ok && static_cast<double>(js[k] - js[k - 1]) >= g.s3();
    separated += ok;
  }
  const double rate = static_cast<double>(separated) / runs;
  CHECK(std::abs(rate - expected) < 4.0 * std::sqrt(expected * (1 - expected) / runs) + 1e-12);
  CHECK(selected / runs == doctest::Approx(static_cast<double>(g.m()) / g.s3()).epsilon(0.05));
}

TEST_CASE("event rows") {
  const auto g = build_sector_grid(1000, 0.5, 2.0 / 27.0);
  const auto rows = sector_events(notched_square(1000, 65), g);
  REQUIRE(rows.size() == g.m());
  for (const auto& r : rows) {
    CHECK_FALSE(r.acted);
    CHECK(r.favourable == (r.j == 9));
    if (!r.empty_sector) {
      CHECK(r.excess == doctest::Approx(polygon_excess(restrict_to_bridge(notched_square(1000, 65), r.x, r.y))));
    }
  }
}

TEST_CASE("cone area statistic") {
  const std::int64_t n = 1000;
  const double half = 0.5 * std::pow(1000.0, -1.0 / 3.0);
  const double hi = std::numbers::pi / 4 + half;
  // First vertex (x, n) of the square with argument at most hi.
  std::int64_t x0 = 0;
  while (std::atan2(static_cast<double>(n), static_cast<double>(x0)) > hi) ++x0;
  const double leg = static_cast<double>(n - x0);
  const auto a = cone_area_statistic(LatticePath::square(n), n);
  REQUIRE(a);
  CHECK(*a == doctest::Approx(leg * leg / 2.0));
  CHECK_FALSE(cone_area_statistic(LatticePath::parse("0:RRRR"), n));
}

}
