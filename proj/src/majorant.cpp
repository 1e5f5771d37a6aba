#include "facetlab/majorant.hpp"

#include <algorithm>
#include <limits>

#include "facetlab/errors.hpp"

namespace facetlab {

double segment_distance(Point p, Point a, Point b) {
  const std::int64_t dx = b.x - a.x;
  const std::int64_t dy = b.y - a.y;
  const std::int64_t px = p.x - a.x;
  const std::int64_t py = p.y - a.y;
  const std::int64_t len2 = dx * dx + dy * dy;
  const std::int64_t dot = px * dx + py * dy;
  if (len2 == 0 || dot <= 0) return std::hypot(static_cast<double>(px), static_cast<double>(py));
  if (dot >= len2) {
    return std::hypot(static_cast<double>(p.x - b.x), static_cast<double>(p.y - b.y));
  }
  const auto c = static_cast<double>(px * dy - py * dx);
  return std::abs(c) / std::sqrt(static_cast<double>(len2));
}

std::vector<Point> upper_chain(std::span<const Point> sorted) {
  std::vector<Point> h;
  h.reserve(sorted.size());
  for (const Point& p : sorted) {
    if (!h.empty() && h.back() == p) continue;
    while (h.size() >= 2 && cross(h[h.size() - 2], h.back(), p) >= 0) h.pop_back();
    h.push_back(p);
  }
  return h;
}

ChainDistance::ChainDistance(std::vector<Point> chain) : chain_(std::move(chain)) {}

std::size_t ChainDistance::covering(Point p) const {
  const std::size_t m = segments();
  if (m == 0) return 0;
  // First segment whose right end reaches p.x.
  auto it = std::lower_bound(chain_.begin() + 1, chain_.end(), p.x,
                             [](const Point& q, std::int64_t x) { return q.x < x; });
  auto j = static_cast<std::size_t>(it - chain_.begin());
  return j == 0 ? 0 : std::min(j - 1, m - 1);
}

std::pair<double, std::size_t> ChainDistance::nearest(Point p, std::size_t hint) const {
  const std::size_t m = segments();
  if (m == 0) {
    if (chain_.empty()) return {0.0, 0};
    return {std::hypot(static_cast<double>(p.x - chain_[0].x), static_cast<double>(p.y - chain_[0].y)),
            0};
  }
  hint = std::min(hint, m - 1);
  double best = segment_distance(p, chain_[hint], chain_[hint + 1]);
  std::size_t arg = hint;
  // Segments left of j lie in {x <= chain_[j].x, y >= chain_[j].y}.
  for (std::size_t j = hint; j-- > 0;) {
    const Point c = chain_[j + 1];
    const double gx = static_cast<double>(std::max<std::int64_t>(0, p.x - c.x));
    const double gy = static_cast<double>(std::max<std::int64_t>(0, c.y - p.y));
    if (std::hypot(gx, gy) > best) break;
    const double d = segment_distance(p, chain_[j], chain_[j + 1]);
    if (d <= best) {
      best = d;
      arg = j;
    }
  }
  for (std::size_t j = hint + 1; j < m; ++j) {
    const Point c = chain_[j];
    const double gx = static_cast<double>(std::max<std::int64_t>(0, c.x - p.x));
    const double gy = static_cast<double>(std::max<std::int64_t>(0, p.y - c.y));
    if (std::hypot(gx, gy) > best) break;
    const double d = segment_distance(p, chain_[j], chain_[j + 1]);
    if (d < best) {
      best = d;
      arg = j;
    }
  }
  return {best, arg};
}

ConcaveMajorant::ConcaveMajorant(std::vector<Point> ext) : ext_(std::move(ext)) {}

std::vector<Facet> ConcaveMajorant::facets() const {
  std::vector<Facet> out;
  out.reserve(facet_count());
  for (std::size_t j = 0; j + 1 < ext_.size(); ++j) out.push_back(Facet{ext_[j], ext_[j + 1]});
  return out;
}

ConcaveMajorant least_concave_majorant(const LatticePath& path) {
  const auto v = path.vertices();
  auto h = upper_chain(v);
  std::erase(h, Point{0, 0});
  return ConcaveMajorant(std::move(h));
}

LatticePath extend_bridge(const Bridge& bridge) {
  StepSequence s(static_cast<std::size_t>(bridge.a().x), Step::Right);
  const auto& bs = bridge.steps();
  for (std::size_t i = 0; i < bs.size(); ++i) s.push_back(bs[i]);
  for (std::int64_t i = 0; i < bridge.b().y; ++i) s.push_back(Step::Down);
  return LatticePath(bridge.a().y, std::move(s));
}

namespace {

struct Scan {
  std::vector<double> lr;
  std::vector<std::size_t> nearest_facet;
};

Scan scan_roughness(const LatticePath& path, const ConcaveMajorant& maj) {
  const auto v = path.vertices();
  Scan out;
  out.lr.assign(v.size(), 0.0);
  out.nearest_facet.assign(v.size(), 0);
  if (maj.facet_count() == 0) return out;
  ChainDistance chain(maj.ext_points());
  std::size_t hint = 0;
  const auto& ext = maj.ext_points();
  for (std::size_t i = 0; i < v.size(); ++i) {
    // Advance the covering facet monotonically along the path.
    while (hint + 1 < chain.segments() && ext[hint + 1].x < v[i].x) ++hint;
    while (hint + 1 < chain.segments() && ext[hint + 1].x == v[i].x && ext[hint + 1].y > v[i].y) {
      ++hint;
    }
    auto [d, j] = chain.nearest(v[i], hint);
    out.lr[i] = d;
    out.nearest_facet[i] = j;
  }
  return out;
}

}  // namespace

double local_roughness(const LatticePath& path, Point v) {
  const auto idx = path.index_of(v);
  if (!idx) throw Error(ErrorCode::PointNotOnPath, "vertex is not on the path");
  const auto maj = least_concave_majorant(path);
  if (maj.facet_count() == 0) return 0.0;
  ChainDistance chain(maj.ext_points());
  return chain.nearest(v, chain.covering(v)).first;
}

std::vector<double> local_roughness_all(const LatticePath& path, const ConcaveMajorant& maj) {
  return scan_roughness(path, maj).lr;
}

std::vector<double> local_roughness_all(const LatticePath& path) {
  return local_roughness_all(path, least_concave_majorant(path));
}

Facet mean_facet(const ConcaveMajorant& maj, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidParams, "ray slope must be positive");
  const auto& e = maj.ext_points();
  for (std::size_t j = 0; j + 1 < e.size(); ++j) {
    const double sa = static_cast<double>(e[j].y) - alpha * static_cast<double>(e[j].x);
    const double sb = static_cast<double>(e[j + 1].y) - alpha * static_cast<double>(e[j + 1].x);
    if (sa >= 0.0 && sb <= 0.0) return Facet{e[j], e[j + 1]};
  }
  throw Error(ErrorCode::RayMissesMajorant, "ray does not cross any facet");
}

Facet mean_facet(const LatticePath& path, double alpha) {
  return mean_facet(least_concave_majorant(path), alpha);
}

std::size_t mid_vertex_index(const LatticePath& path) {
  const auto v = path.vertices();
  std::size_t best = 0;
  std::int64_t best_gap = std::numeric_limits<std::int64_t>::max();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::int64_t g = std::abs(v[i].y - v[i].x);
    if (g < best_gap) {
      best_gap = g;
      best = i;
    }
  }
  return best;
}

double mean_fl(const LatticePath& path) { return mean_facet(path).length(); }

double mean_lr(const LatticePath& path) {
  return local_roughness(path, path.vertex(mid_vertex_index(path)));
}

double max_fl(const LatticePath& path) { return roughness_stats(path).max_fl; }
double max_lr(const LatticePath& path) { return roughness_stats(path).max_lr; }
double mlrf(const LatticePath& path) { return roughness_stats(path).mlrf; }

RoughnessStats roughness_stats(const LatticePath& path) {
  RoughnessStats s;
  const auto maj = least_concave_majorant(path);
  for (std::size_t j = 0; j < maj.facet_count(); ++j) s.max_fl = std::max(s.max_fl, maj.facet(j).length());
  try {
    s.mean_fl = mean_facet(maj).length();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RayMissesMajorant) throw;
    s.ray_missed = true;
  }
  const Scan sc = scan_roughness(path, maj);
  s.mean_lr = sc.lr[mid_vertex_index(path)];
  std::size_t arg = 0;
  for (std::size_t i = 0; i < sc.lr.size(); ++i) {
    if (sc.lr[i] > s.max_lr) {
      s.max_lr = sc.lr[i];
      arg = i;
    }
  }
  if (maj.facet_count() > 0) s.mlrf = maj.facet(sc.nearest_facet[arg]).length();
  return s;
}

}  // namespace facetlab
