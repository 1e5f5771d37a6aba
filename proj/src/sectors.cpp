#include "facetlab/sectors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "facetlab/errors.hpp"
#include "facetlab/majorant.hpp"

namespace facetlab {

namespace {

constexpr double kQuarter = std::numbers::pi / 2.0;

double norm(Point a, Point b) {
  return std::hypot(static_cast<double>(b.x - a.x), static_cast<double>(b.y - a.y));
}

Bridge bridge_between(const LatticePath& path, std::size_t ia, std::size_t ib) {
  return Bridge(path.vertex(ia), path.vertex(ib), path.steps().slice(ia, ib));
}

Bridge connected_bridge(const LatticePath& path, Point x, Point y) {
  const auto ix = path.index_of(x);
  const auto iy = path.index_of(y);
  if (!ix || !iy || *ix > *iy) {
    throw Error(ErrorCode::NotConnected, "endpoints are not joined by a sub-path");
  }
  return bridge_between(path, *ix, *iy);
}

double log_factor(double d) { return d > 1.0 ? std::sqrt(std::log(d)) : 0.0; }

AreaEvent area_event(const Bridge& bridge, double threshold) {
  AreaEvent e;
  e.excess = static_cast<double>(twice_excess_over_chord(bridge)) / 2.0;
  e.threshold = threshold;
  e.holds = passes_threshold(e.excess, threshold);
  return e;
}

std::vector<double> all_lr(const LatticePath& path) { return local_roughness_all(path); }

bool favourable_from(const LatticePath& path, const std::vector<double>& lr, const Cone& cone,
                     double threshold) {
  const auto w = cone_window(path, cone.angle_lo, cone.angle_hi);
  if (!w) return false;
  for (std::size_t i = w->first; i <= w->second; ++i) {
    if (lr[i] >= threshold) return true;
  }
  return false;
}

bool avoids_inner_ball(const LatticePath& path, double radius) {
  for (const Point& v : path.vertices()) {
    if (std::hypot(static_cast<double>(v.x), static_cast<double>(v.y)) < radius) return false;
  }
  return true;
}

double angle_between(const MajorantProbe& a, const MajorantProbe& b) {
  const double dot = std::clamp(a.tx * b.tx + a.ty * b.ty, -1.0, 1.0);
  return std::acos(dot);
}

std::vector<bool> mbt_flags(const LatticePath& path, const SectorGrid& grid, const SectorOptions& opts) {
  const auto r = mbt_set(path, grid, opts);
  std::vector<bool> out(grid.m(), false);
  for (std::size_t j : r.members) out[j - 1] = true;
  return out;
}

}  // namespace

Cone::Cone(double lo, double hi) : angle_lo(lo), angle_hi(hi) {
  if (!(lo >= 0.0 && lo < hi && hi <= kQuarter)) {
    throw Error(ErrorCode::InvalidParams, "cone needs 0 <= lo < hi <= pi/2");
  }
}

bool Cone::contains(Point p) const {
  const double a = std::atan2(static_cast<double>(p.y), static_cast<double>(p.x));
  return a >= angle_lo && a <= angle_hi;
}

ConeEndpoints cone_endpoints(const LatticePath& path, const Cone& cone) {
  const auto w = cone_window(path, cone.angle_lo, cone.angle_hi);
  if (!w) throw Error(ErrorCode::EmptyIntersection, "cone misses the path");
  ConeEndpoints e;
  e.index_x = w->first;
  e.index_y = w->second;
  e.x = path.vertex(w->first);
  e.y = path.vertex(w->second);
  e.length = w->second - w->first;
  return e;
}

const char* to_string(BadAngle b) {
  switch (b) {
    case BadAngle::Plus: return "plus";
    case BadAngle::Minus: return "minus";
    case BadAngle::Neither: break;
  }
  return "neither";
}

double chord_angle(Point x, Point y) {
  return std::atan2(static_cast<double>(x.y - y.y), static_cast<double>(y.x - x.x));
}

BadAngle bad_angle(const LatticePath& path, const Cone& cone, double epsilon) {
  const auto e = cone_endpoints(path, cone);
  if (e.x == e.y) throw Error(ErrorCode::DegenerateChord, "cone meets the path in one vertex");
  const double t = chord_angle(e.x, e.y);
  if (t <= epsilon) return BadAngle::Plus;
  if (t >= kQuarter - epsilon) return BadAngle::Minus;
  return BadAngle::Neither;
}

bool passes_threshold(double value, double threshold) {
  if (threshold == 0.0) return value >= 0.0;
  return value >= threshold + 1e-9 * std::max(1.0, std::abs(threshold));
}

std::int64_t twice_excess_over_chord(const Bridge& bridge) {
  const Point a = bridge.a();
  const Point b = bridge.b();
  std::int64_t s = a.x * b.y - a.y * b.x;
  std::int64_t x = a.x;
  std::int64_t y = a.y;
  const auto& st = bridge.steps();
  for (std::size_t i = 0; i < st.size(); ++i) {
    if (st.is_down(i)) {
      s += x;
      --y;
    } else {
      s += y;
      ++x;
    }
  }
  return s;
}

AreaEvent gac_check(const Bridge& bridge, double eta) {
  return area_event(bridge, eta * std::pow(norm(bridge.a(), bridge.b()), 1.5));
}

AreaEvent gac_check(const LatticePath& path, Point x, Point y, double eta) {
  return gac_check(connected_bridge(path, x, y), eta);
}

AreaEvent log_gac_check(const Bridge& bridge, double eta) {
  const double d = norm(bridge.a(), bridge.b());
  return area_event(bridge, eta * std::pow(d, 1.5) * log_factor(d));
}

AreaEvent log_gac_check(const LatticePath& path, Point x, Point y, double eta) {
  return log_gac_check(connected_bridge(path, x, y), eta);
}

DeviationEvent log_sid_check(const Bridge& bridge, double eta) {
  const auto v = bridge.vertices();
  const Point o{0, 0};
  const Point x = bridge.a();
  const Point y = bridge.b();
  ChainDistance hull(upper_chain(v));
  DeviationEvent e;
  e.witness = x;
  for (const Point& p : v) {
    double d = hull.nearest(p, hull.covering(p)).first;
    d = std::min(d, segment_distance(p, o, x));
    d = std::min(d, segment_distance(p, o, y));
    if (d > e.deviation) {
      e.deviation = d;
      e.witness = p;
    }
  }
  const double n = norm(x, y);
  e.threshold = eta * std::sqrt(n) * log_factor(n);
  e.holds = passes_threshold(e.deviation, e.threshold);
  return e;
}

DeviationEvent log_sid_check(const LatticePath& path, Point x, Point y, double eta) {
  return log_sid_check(connected_bridge(path, x, y), eta);
}

double phi_of_chi(double chi) { return std::pow(chi, 2.0 / 3.0); }

SectorGrid::SectorGrid(std::int64_t n, double chi, double epsilon1)
    : n_(n), chi_(chi), epsilon1_(epsilon1) {
  if (n < 2) throw Error(ErrorCode::InvalidParams, "sector grid needs N >= 2");
  if (!(chi > 0.0)) throw Error(ErrorCode::InvalidParams, "chi must be positive");
  if (!(epsilon1 > 0.0 && epsilon1 < 2.0 / 3.0)) {
    throw Error(ErrorCode::InvalidParams, "epsilon1 must lie in (0, 2/3)");
  }
  const auto nn = static_cast<double>(n);
  theta_ = chi * std::pow(nn, -1.0 / 3.0) * std::cbrt(std::log(nn));
  const double m = std::floor(kQuarter / theta_);
  if (m < 1.0) throw Error(ErrorCode::InvalidParams, "sector opening exceeds the quadrant");
  m_ = static_cast<std::size_t>(m);
  s3_ = std::pow(nn, epsilon1);
}

Cone SectorGrid::sector(std::size_t j) const {
  if (j < 1 || j > m_) throw Error(ErrorCode::IndexOutOfRange, "sector index out of range");
  return Cone(static_cast<double>(j - 1) * theta_, static_cast<double>(j) * theta_);
}

Cone SectorGrid::inner(std::size_t j) const {
  const Cone a = sector(j);
  return Cone(a.angle_lo + theta_ / 4.0, a.angle_hi - theta_ / 4.0);
}

SectorGrid build_sector_grid(std::int64_t n, double chi, double epsilon1) {
  return SectorGrid(n, chi, epsilon1);
}

double favourable_threshold(const SectorGrid& grid, const SectorOptions& opts) {
  const auto n = static_cast<double>(grid.n());
  const double phi = opts.phi_override ? *opts.phi_override : phi_of_chi(grid.chi());
  return phi * std::cbrt(n) * std::pow(std::log(n), 2.0 / 3.0);
}

bool favourable(const LatticePath& path, const SectorGrid& grid, std::size_t j,
                const SectorOptions& opts) {
  return favourable_from(path, all_lr(path), grid.sector(j), favourable_threshold(grid, opts));
}

std::vector<bool> favourable_all(const LatticePath& path, const SectorGrid& grid,
                                 const SectorOptions& opts) {
  const auto lr = all_lr(path);
  const double thr = favourable_threshold(grid, opts);
  std::vector<bool> out(grid.m());
  for (std::size_t j = 1; j <= grid.m(); ++j) out[j - 1] = favourable_from(path, lr, grid.sector(j), thr);
  return out;
}

std::optional<MajorantProbe> majorant_at_angle(const ConcaveMajorant& maj, double phi) {
  if (maj.facet_count() == 0) return std::nullopt;
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  auto side = [&](Point p) { return c * static_cast<double>(p.y) - s * static_cast<double>(p.x); };
  for (std::size_t j = 0; j < maj.facet_count(); ++j) {
    const Facet f = maj.facet(j);
    const double sa = side(f.a);
    const double sb = side(f.b);
    if (sa >= 0.0 && sb <= 0.0) {
      const double t = sa == sb ? 0.0 : sa / (sa - sb);
      MajorantProbe p;
      p.x = static_cast<double>(f.a.x) + t * static_cast<double>(f.b.x - f.a.x);
      p.y = static_cast<double>(f.a.y) + t * static_cast<double>(f.b.y - f.a.y);
      const double len = f.length();
      p.tx = static_cast<double>(f.a.x - f.b.x) / len;
      p.ty = static_cast<double>(f.a.y - f.b.y) / len;
      return p;
    }
  }
  return std::nullopt;
}

bool confined(const LatticePath& path, std::int64_t n, double k1, double k2) {
  const auto nn = static_cast<double>(n);
  for (const Point& v : path.vertices()) {
    const double r = std::hypot(static_cast<double>(v.x), static_cast<double>(v.y));
    if (r < k2 * nn || r > k1 * nn) return false;
  }
  return true;
}

MbtResult mbt_set(const LatticePath& path, const SectorGrid& grid, const SectorOptions& opts) {
  MbtResult out;
  const auto maj = least_concave_majorant(path);
  const std::size_t m = grid.m();
  std::vector<std::optional<MajorantProbe>> z(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    z[j] = majorant_at_angle(maj, static_cast<double>(j) * grid.theta());
  }
  const auto n = static_cast<double>(grid.n());
  const double dist_bound = 10.0 * std::numbers::pi * opts.k1 * n / static_cast<double>(m);
  const double turn_bound = 10.0 * std::numbers::pi / static_cast<double>(m);
  for (std::size_t j = 1; j <= m; ++j) {
    if (!z[j] || !z[j - 1]) continue;
    const double d = std::hypot(z[j]->x - z[j - 1]->x, z[j]->y - z[j - 1]->y);
    if (d <= dist_bound && angle_between(*z[j], *z[j - 1]) <= turn_bound) out.members.push_back(j);
  }
  out.confined = confined(path, grid.n(), opts.k1, 0.0);
  out.soft_check = !out.confined || static_cast<double>(out.members.size()) >= 0.9 * static_cast<double>(m);
  return out;
}

SectorReport res_j(ChainState& state, const SectorGrid& grid, std::size_t j, const SectorOptions& opts) {
  SectorReport r;
  r.j = j;
  const Cone b = grid.inner(j);
  const auto w = cone_window(state.path(), b.angle_lo, b.angle_hi);
  if (!w) {
    r.empty_sector = true;
    return r;
  }
  r.x = state.path().vertex(w->first);
  r.y = state.path().vertex(w->second);
  if (w->first == w->second) return r;
  r.acted = true;
  r.tier = resample_gibbs(state, w->first, w->second, opts.gibbs).tier;
  const LatticePath& p = state.path();
  const Bridge br = bridge_between(p, w->first, w->second);
  const auto gac = gac_check(br, opts.eta);
  const auto lgac = log_gac_check(br, opts.eta);
  const auto sid = log_sid_check(br, opts.eta);
  r.gac = gac.holds;
  r.log_gac = lgac.holds;
  r.log_sid = sid.holds;
  r.success = r.log_gac && r.log_sid;
  r.excess = gac.excess;
  r.deviation = sid.deviation;
  r.witness = sid.witness;
  if (local_roughness(p, sid.witness) < sid.deviation - 1e-9) {
    throw Error(ErrorCode::AuditFailure, "roughness at the deviation witness below the deviation");
  }
  r.favourable = favourable(p, grid, j, opts);
  const auto mbt = mbt_set(p, grid, opts);
  r.mbt = std::find(mbt.members.begin(), mbt.members.end(), j) != mbt.members.end();
  return r;
}

FullResReport full_res(ChainState& state, const SectorGrid& grid, const SectorOptions& opts) {
  return full_res(state, grid, 1.0 / grid.s3(), opts);
}

FullResReport full_res(ChainState& state, const SectorGrid& grid, double select_probability,
                       const SectorOptions& opts) {
  FullResReport out;
  const std::size_t m = grid.m();
  const auto n = static_cast<double>(grid.n());
  const double fl_bound = grid.s2() * std::pow(n, 2.0 / 3.0) * std::cbrt(std::log(n));
  auto flags = [&](std::size_t i) {
    const LatticePath& p = state.path();
    StageFlags f;
    f.g1 = max_fl(p) <= fl_bound;
    f.g2 = confined(p, grid.n(), opts.k1, opts.k2);
    try {
      f.g3 = bad_angle(p, grid.inner(std::max<std::size_t>(i, 1)), opts.epsilon) == BadAngle::Neither;
    } catch (const Error&) {
      f.g3 = true;
    }
    return f;
  };
  out.stages.push_back(flags(0));
  for (std::size_t j = 1; j <= m; ++j) {
    const bool selected = select_probability > 0.0 && state.rng().bernoulli(select_probability);
    if (!selected) {
      SectorReport r;
      r.j = j;
      out.sectors.push_back(r);
      out.stages.push_back(out.stages.back());
      continue;
    }
    const LatticePath before = state.path();
    const double fl_before = max_fl(before);
    const auto fav_before = favourable_all(before, grid, opts);
    SectorReport r = res_j(state, grid, j, opts);
    r.selected = true;
    if (r.acted) {
      ++out.acted;
      if (r.success) ++out.successes;
      const double fl_after = max_fl(state.path());
      if (std::max(fl_before, fl_after) <= fl_bound && avoids_inner_ball(before, opts.k2 * n)) {
        const auto fav_after = favourable_all(state.path(), grid, opts);
        for (std::size_t k = 1; k <= m; ++k) {
          const std::size_t gap = k > j ? k - j : j - k;
          if (static_cast<double>(gap) < grid.s3() + 1.0) continue;
          ++out.interference_checks;
          if (fav_before[k - 1] != fav_after[k - 1]) ++out.interference_violations;
        }
      }
    }
    out.sectors.push_back(r);
    out.stages.push_back(flags(j));
  }
  return out;
}

std::vector<SectorReport> sector_events(const LatticePath& path, const SectorGrid& grid,
                                        const SectorOptions& opts) {
  std::vector<SectorReport> rows;
  const auto fav = favourable_all(path, grid, opts);
  const auto mbt = mbt_flags(path, grid, opts);
  for (std::size_t j = 1; j <= grid.m(); ++j) {
    SectorReport r;
    r.j = j;
    r.favourable = fav[j - 1];
    r.mbt = mbt[j - 1];
    const Cone b = grid.inner(j);
    const auto w = cone_window(path, b.angle_lo, b.angle_hi);
    if (!w) {
      r.empty_sector = true;
    } else {
      r.x = path.vertex(w->first);
      r.y = path.vertex(w->second);
      const Bridge br = bridge_between(path, w->first, w->second);
      const auto gac = gac_check(br, opts.eta);
      const auto sid = log_sid_check(br, opts.eta);
      r.gac = gac.holds;
      r.log_gac = log_gac_check(br, opts.eta).holds;
      r.log_sid = sid.holds;
      r.success = r.log_gac && r.log_sid;
      r.excess = gac.excess;
      r.deviation = sid.deviation;
      r.witness = sid.witness;
    }
    rows.push_back(r);
  }
  return rows;
}

std::optional<double> cone_area_statistic(const LatticePath& path, std::int64_t n) {
  const double half = 0.5 * std::pow(static_cast<double>(n), -1.0 / 3.0);
  const double c = std::numbers::pi / 4.0;
  const auto w = cone_window(path, std::max(0.0, c - half), std::min(kQuarter, c + half));
  if (!w) return std::nullopt;
  return static_cast<double>(twice_excess_over_chord(bridge_between(path, w->first, w->second))) / 2.0;
}

}  // namespace facetlab
