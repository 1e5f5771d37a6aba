#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "facetlab/chain.hpp"
#include "facetlab/path.hpp"

namespace facetlab {

/// Cone of apex the origin between two arguments in [0, pi/2].
struct Cone {
  double angle_lo = 0.0;
  double angle_hi = 0.0;

  Cone() = default;
  Cone(double lo, double hi);
  bool contains(Point p) const;
};

struct ConeEndpoints {
  Point x;
  Point y;
  std::size_t index_x = 0;
  std::size_t index_y = 0;
  /// Number of steps between x and y.
  std::size_t length = 0;
};

/// Extreme path vertices inside the cone.
ConeEndpoints cone_endpoints(const LatticePath& path, const Cone& cone);

enum class BadAngle { Neither, Plus, Minus };
const char* to_string(BadAngle b);

/// Angle of the segment [x, y] with the horizontal axis, in [0, pi/2].
double chord_angle(Point x, Point y);
BadAngle bad_angle(const LatticePath& path, const Cone& cone, double epsilon);

/// Event test with the reproducibility guard band: exact `value >= 0` when the
/// threshold is zero, otherwise value >= threshold + 1e-9 max(1, threshold).
bool passes_threshold(double value, double threshold);

/// Twice the signed area between a bridge and its chord (positive above).
std::int64_t twice_excess_over_chord(const Bridge& bridge);

struct AreaEvent {
  bool holds = false;
  double excess = 0.0;
  double threshold = 0.0;
};

AreaEvent gac_check(const Bridge& bridge, double eta);
AreaEvent gac_check(const LatticePath& path, Point x, Point y, double eta);
AreaEvent log_gac_check(const Bridge& bridge, double eta);
AreaEvent log_gac_check(const LatticePath& path, Point x, Point y, double eta);

struct DeviationEvent {
  bool holds = false;
  double deviation = 0.0;
  double threshold = 0.0;
  Point witness;
};

/// Largest distance from a bridge vertex to the boundary of
/// conv([0,x] U [0,y] U bridge).
DeviationEvent log_sid_check(const Bridge& bridge, double eta);
DeviationEvent log_sid_check(const LatticePath& path, Point x, Point y, double eta);

struct SectorOptions {
  double chi = 0.5;
  double eta = 0.05;
  double epsilon = 0.1;
  double epsilon1 = 2.0 / 27.0;
  double k1 = 3.0;
  double k2 = 0.15;
  /// Replaces phi(chi) = chi^{2/3} when set.
  std::optional<double> phi_override;
  GibbsOptions gibbs;
};

double phi_of_chi(double chi);

class SectorGrid {
 public:
  SectorGrid(std::int64_t n, double chi, double epsilon1);

  std::int64_t n() const { return n_; }
  double chi() const { return chi_; }
  double epsilon1() const { return epsilon1_; }
  double theta() const { return theta_; }
  std::size_t m() const { return m_; }
  double s1() const { return s3_ - 1.0; }
  double s2() const { return chi_ / 4.0 * std::pow(static_cast<double>(n_), epsilon1_); }
  double s3() const { return s3_; }
  /// s2 < (chi / 2) s1.
  bool schedule_feasible() const { return s2() < chi_ / 2.0 * s1(); }

  /// Sector A_j, j in [1, m].
  Cone sector(std::size_t j) const;
  /// Inner sector B_j with margins theta / 4.
  Cone inner(std::size_t j) const;

 private:
  std::int64_t n_;
  double chi_;
  double epsilon1_;
  double theta_;
  std::size_t m_;
  double s3_;
};

SectorGrid build_sector_grid(std::int64_t n, double chi, double epsilon1);

double favourable_threshold(const SectorGrid& grid, const SectorOptions& opts);
bool favourable(const LatticePath& path, const SectorGrid& grid, std::size_t j,
                const SectorOptions& opts = {});
/// favourable(path, grid, j) for j = 1..m at index j - 1.
std::vector<bool> favourable_all(const LatticePath& path, const SectorGrid& grid,
                                 const SectorOptions& opts = {});

struct MbtResult {
  std::vector<std::size_t> members;
  /// Path inside the ball of radius K1 N.
  bool confined = false;
  /// |MBT| >= 0.9 m whenever confined.
  bool soft_check = true;
};
MbtResult mbt_set(const LatticePath& path, const SectorGrid& grid, const SectorOptions& opts = {});

/// Point of the majorant at argument phi and the counterclockwise unit tangent
/// there (leftmost facet at a corner).
struct MajorantProbe {
  double x = 0.0;
  double y = 0.0;
  double tx = 0.0;
  double ty = 0.0;
};
std::optional<MajorantProbe> majorant_at_angle(const ConcaveMajorant& maj, double phi);

bool confined(const LatticePath& path, std::int64_t n, double k1, double k2);

struct SectorReport {
  std::size_t j = 0;
  /// Drawn by the Bernoulli selection of full_res.
  bool selected = false;
  bool acted = false;
  bool success = false;
  bool gac = false;
  bool log_gac = false;
  bool log_sid = false;
  bool favourable = false;
  bool mbt = false;
  bool empty_sector = false;
  GibbsTier tier = GibbsTier::Kept;
  double excess = 0.0;
  double deviation = 0.0;
  Point x;
  Point y;
  Point witness;
};

/// Resamples the path between the extreme vertices of inner sector B_j.
SectorReport res_j(ChainState& state, const SectorGrid& grid, std::size_t j,
                   const SectorOptions& opts = {});

struct StageFlags {
  bool g1 = false;
  bool g2 = false;
  bool g3 = false;
};

struct FullResReport {
  std::vector<SectorReport> sectors;
  /// Flags for stages 0..m.
  std::vector<StageFlags> stages;
  std::uint64_t interference_checks = 0;
  std::uint64_t interference_violations = 0;
  std::size_t acted = 0;
  std::size_t successes = 0;
};

/// Bernoulli(1/s3) selection of sectors, resampled in increasing j.
FullResReport full_res(ChainState& state, const SectorGrid& grid, const SectorOptions& opts = {});
FullResReport full_res(ChainState& state, const SectorGrid& grid, double select_probability,
                       const SectorOptions& opts);

/// Event rows for a stored path without resampling.
std::vector<SectorReport> sector_events(const LatticePath& path, const SectorGrid& grid,
                                        const SectorOptions& opts = {});

/// Area excess over the triangle inside the diagonal cone of opening N^{-1/3};
/// nullopt when the cone misses the path.
std::optional<double> cone_area_statistic(const LatticePath& path, std::int64_t n);

}  // namespace facetlab
