#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "facetlab/path.hpp"

namespace facetlab {

struct Facet {
  Point a;
  Point b;
  double length() const {
    return std::hypot(static_cast<double>(b.x - a.x), static_cast<double>(b.y - a.y));
  }
  friend bool operator==(const Facet&, const Facet&) = default;
};

/// Twice the signed area of triangle (o, a, b); positive for a left turn.
constexpr std::int64_t cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double segment_distance(Point p, Point a, Point b);

/// Clockwise upper chain of points sorted by x ascending, then y descending.
/// Collinear interior points are dropped.
std::vector<Point> upper_chain(std::span<const Point> sorted);

/// Nearest-segment queries against a monotone (x up, y down) polyline.
class ChainDistance {
 public:
  explicit ChainDistance(std::vector<Point> chain);

  std::size_t segments() const { return chain_.size() < 2 ? 0 : chain_.size() - 1; }
  /// Distance from p to the polyline and the leftmost segment attaining it.
  /// `hint` is any segment index to start the search from.
  std::pair<double, std::size_t> nearest(Point p, std::size_t hint) const;
  /// Segment index whose x-range covers p.x (leftmost).
  std::size_t covering(Point p) const;

 private:
  std::vector<Point> chain_;
};

/// Extreme points of conv(path U {0}) other than the origin, clockwise from
/// the y-axis to the x-axis.
class ConcaveMajorant {
 public:
  ConcaveMajorant() = default;
  explicit ConcaveMajorant(std::vector<Point> ext);

  const std::vector<Point>& ext_points() const { return ext_; }
  std::vector<Facet> facets() const;
  std::size_t facet_count() const { return ext_.size() < 2 ? 0 : ext_.size() - 1; }
  Facet facet(std::size_t j) const { return Facet{ext_[j], ext_[j + 1]}; }
  bool empty() const { return ext_.empty(); }

 private:
  std::vector<Point> ext_;
};

ConcaveMajorant least_concave_majorant(const LatticePath& path);

/// Path obtained from a bridge by prepending Right steps from the y-axis and
/// appending Down steps to the x-axis.
LatticePath extend_bridge(const Bridge& bridge);

/// Distance from a path vertex to the majorant. Zero for every vertex of an
/// axis-degenerate path (no facet).
double local_roughness(const LatticePath& path, Point v);
/// LR of every vertex, in path order.
std::vector<double> local_roughness_all(const LatticePath& path, const ConcaveMajorant& maj);
std::vector<double> local_roughness_all(const LatticePath& path);

/// Facet crossed by the ray y = alpha x; leftmost on ties.
Facet mean_facet(const LatticePath& path, double alpha = 1.0);
Facet mean_facet(const ConcaveMajorant& maj, double alpha = 1.0);
/// Vertex index closest to the diagonal y = x; leftmost on ties.
std::size_t mid_vertex_index(const LatticePath& path);

double mean_fl(const LatticePath& path);
double mean_lr(const LatticePath& path);
double max_fl(const LatticePath& path);
double max_lr(const LatticePath& path);
double mlrf(const LatticePath& path);

struct RoughnessStats {
  double mean_fl = 0.0;
  double mean_lr = 0.0;
  double max_fl = 0.0;
  double max_lr = 0.0;
  double mlrf = 0.0;
  bool ray_missed = false;
};

/// All facet/roughness observables from a single majorant pass.
RoughnessStats roughness_stats(const LatticePath& path);

}  // namespace facetlab
