#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "facetlab/path.hpp"
#include "facetlab/rng.hpp"
#include "facetlab/sectors.hpp"

namespace facetlab {

/// Enumeration id of a path: length in the high word, bit pattern below.
std::uint64_t path_id(const LatticePath& path);
LatticePath path_from_id(std::uint64_t id);

struct ExactEntry {
  std::size_t length = 0;
  std::uint64_t pattern = 0;
  std::int64_t area = 0;
  double probability = 0.0;
};

struct ExactTable {
  /// Feasible paths in (length, pattern) order.
  std::vector<ExactEntry> entries;
  std::size_t truncation = 0;
  /// Free-measure mass of the feasible paths of length <= truncation.
  double feasible_mass = 0.0;
  /// (2 lambda)^{L+1} / (1 - 2 lambda) / feasible_mass.
  double neglected_bound = 0.0;

  std::map<std::pair<std::size_t, std::int64_t>, double> length_area_marginal() const;
};

/// Conditioned law restricted to paths of length <= truncation (at most 26).
ExactTable exact_conditional(const ModelParams& params, std::size_t truncation);

double neglected_mass_bound(double lambda, std::size_t truncation, double feasible_mass);

/// Joint law of (length, area) under the conditioned measure by a
/// q-binomial recursion, with length and area lumped at the caps.
struct LengthAreaLaw {
  std::map<std::pair<std::size_t, std::int64_t>, double> table;
  std::size_t truncation = 0;
  std::size_t length_cap = 0;
  std::int64_t area_cap = 0;
  double feasible_mass = 0.0;
  double neglected_bound = 0.0;
};

/// Lumping key used by both the exact law and empirical histograms.
inline std::pair<std::size_t, std::int64_t> lumped_key(std::size_t length, std::int64_t area,
                                                      std::size_t length_cap, std::int64_t area_cap) {
  return {std::min(length, length_cap), std::min(area, area_cap)};
}

/// Smallest truncation L whose neglected-mass bound is below `tolerance`.
LengthAreaLaw exact_length_area_law(const ModelParams& params, std::size_t length_cap,
                                    std::int64_t area_cap, double tolerance = 1e-8);
LengthAreaLaw exact_length_area_law_truncated(const ModelParams& params, std::size_t truncation,
                                              std::size_t length_cap, std::int64_t area_cap);

/// Upper hull by gift wrapping, clockwise from the leftmost-topmost point to
/// the rightmost-lowest point; collinear points are skipped.
std::vector<Point> brute_hull(std::vector<Point> points);
/// brute_hull of the path vertices and the origin, origin removed.
std::vector<Point> brute_majorant(const LatticePath& path);

/// Finite multivalued map T from A into subsets of B with two point masses.
struct MultivaluedMap {
  std::map<std::uint64_t, std::vector<std::uint64_t>> images;
  std::map<std::uint64_t, double> p1;
  std::map<std::uint64_t, double> p2;
  /// Target set; the union of the images when empty.
  std::optional<std::vector<std::uint64_t>> target;
};

struct MvmpResult {
  double phi = 0.0;
  double psi = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

MvmpResult mvmp_audit(const MultivaluedMap& map);

struct SurgAuditSpec {
  Cone cone;
  double epsilon = 0.1;
  /// Length of the path inside the cone.
  std::size_t k = 0;
  /// Number of inserted vertical steps |H|.
  std::size_t h = 1;
  std::size_t max_length = 10;
};

/// T(g) = {Surg(g, H) : |H| = h, H horizontal steps inside the cone} on
/// A = Bad+ with cone length k and at least h horizontal steps in the cone;
/// both measures are the conditioned law on lengths <= max_length + h.
MultivaluedMap surg_multivalued_map(const ModelParams& params, const SurgAuditSpec& spec);

/// Random bipartite map with random positive masses for fuzzing.
MultivaluedMap random_multivalued_map(std::size_t domain, std::size_t codomain, RngStream& rng);

inline constexpr std::array<double, 3> kBridgeTimes{0.25, 0.5, 0.75};

/// Facet lengths L(s) and gaps R(s) of the concave majorant of uniform
/// diagonal bridges (0, n) -> (n, 0), seen as walks of 2n steps; L is in
/// units of 2n and R in units of (2n)^{1/2}.
struct BridgeMajorantSample {
  std::size_t span = 0;
  std::array<std::vector<double>, 3> facet_length;
  std::array<std::vector<double>, 3> gap;
};
BridgeMajorantSample bb_majorant_reference(std::size_t span, std::size_t samples, RngStream& rng);

}  // namespace facetlab
