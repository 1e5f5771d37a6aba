#include "facetlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "facetlab/errors.hpp"
#include "facetlab/majorant.hpp"
#include "facetlab/samplers.hpp"

namespace facetlab {

namespace {

constexpr std::size_t kIdBits = 32;

std::int64_t pattern_area(std::size_t len, std::uint64_t pattern) {
  std::int64_t rights = 0;
  std::int64_t inv = 0;
  for (std::size_t i = 0; i < len; ++i) {
    if ((pattern >> (len - 1 - i)) & 1U) {
      inv += rights;
    } else {
      ++rights;
    }
  }
  return inv;
}

std::vector<std::size_t> right_steps(const LatticePath& p, std::size_t begin, std::size_t end) {
  std::vector<std::size_t> out;
  for (std::size_t i = begin; i < end; ++i) {
    if (!p.steps().is_down(i)) out.push_back(i);
  }
  return out;
}

/// Advances an h-subset of {0..n-1} in lexicographic order.
bool next_subset(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t h = idx.size();
  for (std::size_t i = h; i-- > 0;) {
    if (idx[i] < n - h + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < h; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

LengthAreaLaw run_length_area_dp(const ModelParams& params, std::optional<std::size_t> fixed,
                                 std::size_t length_cap, std::int64_t area_cap, double tolerance) {
  const std::int64_t need = params.area_threshold();
  if (area_cap < need) throw Error(ErrorCode::InvalidParams, "area cap below the area threshold");
  const double lam = params.lambda();
  const auto cap = static_cast<std::size_t>(area_cap);
  constexpr std::size_t kMaxLength = 100000;
  const std::size_t limit = fixed ? *fixed : kMaxLength;

  // w[k][a]: free-measure weight of length-n paths with k Down steps and
  // area min(a, cap).
  std::vector<std::vector<double>> w(1, std::vector<double>(cap + 1, 0.0));
  w[0][0] = 1.0 - 2.0 * lam;
  std::map<std::pair<std::size_t, std::int64_t>, double> acc;
  double mass = 0.0;
  auto collect = [&](std::size_t n) {
    for (std::size_t k = 0; k < w.size(); ++k) {
      for (std::size_t a = static_cast<std::size_t>(need); a <= cap; ++a) {
        if (w[k][a] == 0.0) continue;
        acc[lumped_key(n, static_cast<std::int64_t>(a), length_cap, area_cap)] += w[k][a];
        mass += w[k][a];
      }
    }
  };
  collect(0);
  std::size_t n = 0;
  while (true) {
    if (fixed ? n == *fixed : (mass > 0.0 && neglected_mass_bound(lam, n, mass) < tolerance)) break;
    if (n == limit) throw Error(ErrorCode::BudgetExceeded, "truncation limit reached");
    ++n;
    std::vector<std::vector<double>> next(n + 1, std::vector<double>(cap + 1, 0.0));
    for (std::size_t k = 0; k <= n; ++k) {
      if (k < n) {
        for (std::size_t a = 0; a <= cap; ++a) next[k][a] += lam * w[k][a];
      }
      if (k >= 1) {
        const std::size_t gain = n - k;
        for (std::size_t a = 0; a <= cap; ++a) {
          const double v = w[k - 1][a];
          if (v != 0.0) next[k][std::min(a + gain, cap)] += lam * v;
        }
      }
    }
    w.swap(next);
    collect(n);
  }
  if (mass <= 0.0) throw Error(ErrorCode::BudgetExceeded, "no feasible path within the truncation");
  LengthAreaLaw out;
  out.truncation = n;
  out.length_cap = length_cap;
  out.area_cap = area_cap;
  out.feasible_mass = mass;
  out.neglected_bound = neglected_mass_bound(lam, n, mass);
  for (const auto& [key, v] : acc) out.table[key] = v / mass;
  return out;
}

}  // namespace

std::uint64_t path_id(const LatticePath& path) {
  const std::size_t len = path.length();
  if (len >= kIdBits) throw Error(ErrorCode::IndexOutOfRange, "path too long for an id");
  std::uint64_t pattern = 0;
  for (std::size_t i = 0; i < len; ++i) pattern = (pattern << 1) | (path.steps().is_down(i) ? 1U : 0U);
  return (static_cast<std::uint64_t>(len) << kIdBits) | pattern;
}

LatticePath path_from_id(std::uint64_t id) {
  return path_from_pattern(static_cast<std::size_t>(id >> kIdBits), id & 0xFFFFFFFFULL);
}

double neglected_mass_bound(double lambda, std::size_t truncation, double feasible_mass) {
  return std::pow(2.0 * lambda, static_cast<double>(truncation + 1)) / (1.0 - 2.0 * lambda) /
         feasible_mass;
}

std::map<std::pair<std::size_t, std::int64_t>, double> ExactTable::length_area_marginal() const {
  std::map<std::pair<std::size_t, std::int64_t>, double> m;
  for (const auto& e : entries) m[{e.length, e.area}] += e.probability;
  return m;
}

ExactTable exact_conditional(const ModelParams& params, std::size_t truncation) {
  if (truncation > PathEnumeration::kMaxLength) {
    throw Error(ErrorCode::BudgetExceeded, "enumeration budget is 2^27 paths");
  }
  const double lam = params.lambda();
  const std::int64_t need = params.area_threshold();
  ExactTable t;
  t.truncation = truncation;
  double w = 1.0 - 2.0 * lam;
  for (std::size_t len = 0; len <= truncation; ++len) {
    const std::uint64_t count = std::uint64_t{1} << len;
    std::uint64_t feasible = 0;
    for (std::uint64_t pat = 0; pat < count; ++pat) {
      const std::int64_t a = pattern_area(len, pat);
      if (a < need) continue;
      t.entries.push_back(ExactEntry{len, pat, a, w});
      ++feasible;
    }
    t.feasible_mass += static_cast<double>(feasible) * w;
    w *= lam;
  }
  if (t.entries.empty()) throw Error(ErrorCode::BudgetExceeded, "no feasible path within the truncation");
  for (auto& e : t.entries) e.probability /= t.feasible_mass;
  t.neglected_bound = neglected_mass_bound(lam, truncation, t.feasible_mass);
  return t;
}

LengthAreaLaw exact_length_area_law(const ModelParams& params, std::size_t length_cap,
                                    std::int64_t area_cap, double tolerance) {
  return run_length_area_dp(params, std::nullopt, length_cap, area_cap, tolerance);
}

LengthAreaLaw exact_length_area_law_truncated(const ModelParams& params, std::size_t truncation,
                                              std::size_t length_cap, std::int64_t area_cap) {
  return run_length_area_dp(params, truncation, length_cap, area_cap, 0.0);
}

std::vector<Point> brute_hull(std::vector<Point> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() <= 1) return points;
  auto leftmost_top = [](const Point& a, const Point& b) {
    return a.x != b.x ? a.x < b.x : a.y > b.y;
  };
  auto rightmost_low = [](const Point& a, const Point& b) {
    return a.x != b.x ? a.x > b.x : a.y < b.y;
  };
  const Point start = *std::min_element(points.begin(), points.end(), leftmost_top);
  const Point end = *std::min_element(points.begin(), points.end(), rightmost_low);
  auto dist2 = [](Point a, Point b) { return (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y); };
  std::vector<Point> hull{start};
  Point p = start;
  while (p != end) {
    Point best = p;
    for (const Point& q : points) {
      if (q == p) continue;
      if (best == p) {
        best = q;
        continue;
      }
      const std::int64_t c = cross(p, best, q);
      if (c > 0 || (c == 0 && dist2(p, q) > dist2(p, best))) best = q;
    }
    p = best;
    hull.push_back(p);
    if (hull.size() > points.size()) throw Error(ErrorCode::AuditFailure, "gift wrapping did not close");
  }
  return hull;
}

std::vector<Point> brute_majorant(const LatticePath& path) {
  auto pts = path.vertices();
  pts.push_back(Point{0, 0});
  auto h = brute_hull(std::move(pts));
  std::erase(h, Point{0, 0});
  return h;
}

MvmpResult mvmp_audit(const MultivaluedMap& map) {
  MvmpResult r;
  auto mass = [](const std::map<std::uint64_t, double>& m, std::uint64_t k) {
    const auto it = m.find(k);
    return it == m.end() ? 0.0 : it->second;
  };
  std::map<std::uint64_t, std::size_t> preimages;
  std::size_t min_image = 0;
  bool first = true;
  for (const auto& [a, img] : map.images) {
    const std::set<std::uint64_t> uniq(img.begin(), img.end());
    if (uniq.empty()) throw Error(ErrorCode::EmptyImage, "multivalued map has an empty image");
    const double pa = mass(map.p1, a);
    r.lhs += pa;
    for (std::uint64_t b : uniq) {
      ++preimages[b];
      const double pb = mass(map.p2, b);
      const double ratio = pb > 0.0 ? pa / pb : (pa > 0.0 ? HUGE_VAL : 0.0);
      r.phi = std::max(r.phi, ratio);
    }
    min_image = first ? uniq.size() : std::min(min_image, uniq.size());
    first = false;
  }
  std::size_t max_pre = 0;
  for (const auto& [b, c] : preimages) max_pre = std::max(max_pre, c);
  r.psi = min_image == 0 ? 0.0 : static_cast<double>(max_pre) / static_cast<double>(min_image);
  double pb_total = 0.0;
  if (map.target) {
    const std::set<std::uint64_t> tb(map.target->begin(), map.target->end());
    for (std::uint64_t b : tb) pb_total += mass(map.p2, b);
  } else {
    for (const auto& [b, c] : preimages) pb_total += mass(map.p2, b);
  }
  r.rhs = r.phi * r.psi * pb_total;
  r.holds = r.lhs <= r.rhs * (1.0 + 1e-12);
  return r;
}

MultivaluedMap surg_multivalued_map(const ModelParams& params, const SurgAuditSpec& spec) {
  const std::size_t top = spec.max_length + spec.h;
  if (top > PathEnumeration::kMaxLength) {
    throw Error(ErrorCode::BudgetExceeded, "surgery audit exceeds the enumeration budget");
  }
  const auto law = exact_conditional(params, top);
  std::map<std::uint64_t, double> p;
  for (const auto& e : law.entries) {
    p[(static_cast<std::uint64_t>(e.length) << kIdBits) | e.pattern] = e.probability;
  }
  MultivaluedMap m;
  for (const auto& e : law.entries) {
    if (e.length > spec.max_length) break;
    const LatticePath g = path_from_pattern(e.length, e.pattern);
    const auto w = cone_window(g, spec.cone.angle_lo, spec.cone.angle_hi);
    if (!w || w->first == w->second || w->second - w->first != spec.k) continue;
    if (bad_angle(g, spec.cone, spec.epsilon) != BadAngle::Plus) continue;
    const auto rights = right_steps(g, w->first, w->second);
    if (rights.size() < spec.h) continue;
    std::vector<std::uint64_t> images;
    std::vector<std::size_t> idx(spec.h);
    for (std::size_t i = 0; i < spec.h; ++i) idx[i] = i;
    std::vector<std::size_t> chosen(spec.h);
    do {
      for (std::size_t i = 0; i < spec.h; ++i) chosen[i] = rights[idx[i]];
      images.push_back(path_id(surg(g, chosen)));
    } while (next_subset(idx, rights.size()));
    m.images[path_id(g)] = std::move(images);
  }
  m.p1 = p;
  m.p2 = std::move(p);
  return m;
}

MultivaluedMap random_multivalued_map(std::size_t domain, std::size_t codomain, RngStream& rng) {
  MultivaluedMap m;
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::size_t a = 0; a < domain; ++a) {
    const std::size_t deg = 1 + rng.uniform_below(std::min<std::size_t>(4, codomain));
    std::vector<std::uint64_t> img;
    for (std::size_t i = 0; i < deg; ++i) img.push_back(rng.uniform_below(codomain));
    m.images[a] = std::move(img);
    const double v = rng.uniform_open();
    m.p1[a] = v;
    s1 += v;
  }
  for (std::size_t b = 0; b < codomain; ++b) {
    const double v = rng.uniform_open();
    m.p2[b] = v;
    s2 += v;
  }
  // Masses of A are a sub-probability: rescale so that A carries at most half.
  for (auto& [a, v] : m.p1) v /= 2.0 * s1;
  for (auto& [b, v] : m.p2) v /= s2;
  return m;
}

BridgeMajorantSample bb_majorant_reference(std::size_t span, std::size_t samples, RngStream& rng) {
  if (span < 64) throw Error(ErrorCode::InvalidParams, "bridge span must be at least 64");
  BridgeMajorantSample out;
  out.span = span;
  const auto n = static_cast<std::int64_t>(span);
  const double steps = 2.0 * static_cast<double>(span);
  const double root = std::sqrt(steps);
  std::vector<Point> walk(2 * span + 1);
  for (std::size_t s = 0; s < samples; ++s) {
    const Bridge br = sample_bridge_uniform(Point{0, n}, Point{n, 0}, rng);
    std::int64_t h = 0;
    walk[0] = Point{0, 0};
    for (std::size_t i = 0; i < br.length(); ++i) {
      h += br.steps().is_down(i) ? -1 : 1;
      walk[i + 1] = Point{static_cast<std::int64_t>(i + 1), h};
    }
    const auto chain = upper_chain(walk);
    for (std::size_t q = 0; q < kBridgeTimes.size(); ++q) {
      const double t = kBridgeTimes[q] * steps;
      std::size_t j = 0;
      while (j + 2 < chain.size() && static_cast<double>(chain[j + 1].x) < t) ++j;
      const Point a = chain[j];
      const Point b = chain[j + 1];
      const double len = static_cast<double>(b.x - a.x);
      const double c = static_cast<double>(a.y) + (t - static_cast<double>(a.x)) / len *
                                                      static_cast<double>(b.y - a.y);
      const auto ti = static_cast<std::size_t>(std::floor(t));
      const double wt = ti + 1 < walk.size()
                            ? static_cast<double>(walk[ti].y) +
                                  (t - static_cast<double>(ti)) *
                                      static_cast<double>(walk[ti + 1].y - walk[ti].y)
                            : static_cast<double>(walk[ti].y);
      out.facet_length[q].push_back(len / steps);
      out.gap[q].push_back(std::max(0.0, c - wt) / root);
    }
  }
  return out;
}

}  // namespace facetlab
