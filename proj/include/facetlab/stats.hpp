#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace facetlab {

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);
double quantile(std::vector<double> x, double q);
double median(std::vector<double> x);

/// Integrated autocorrelation time by non-overlapping batch means with
/// batch size about sqrt(n); at least 1.
double integrated_autocorr_time(std::span<const double> x);

/// Total variation distance between two probability tables on the same key type.
template <class Key>
double total_variation(const std::map<Key, double>& p, const std::map<Key, double>& q) {
  double s = 0.0;
  auto i = p.begin();
  auto j = q.begin();
  while (i != p.end() || j != q.end()) {
    if (j == q.end() || (i != p.end() && i->first < j->first)) {
      s += std::abs(i->second);
      ++i;
    } else if (i == p.end() || j->first < i->first) {
      s += std::abs(j->second);
      ++j;
    } else {
      s += std::abs(i->second - j->second);
      ++i;
      ++j;
    }
  }
  return 0.5 * s;
}

/// Normalises a count table into probabilities.
template <class Key>
std::map<Key, double> normalise(const std::map<Key, std::uint64_t>& counts) {
  double total = 0.0;
  for (const auto& [k, c] : counts) total += static_cast<double>(c);
  std::map<Key, double> out;
  for (const auto& [k, c] : counts) out[k] = static_cast<double>(c) / total;
  return out;
}

struct ChiSquare {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

/// Goodness of fit of counts against probabilities; adjacent bins are pooled
/// until each expected count is at least `min_expected`.
ChiSquare chi_square_gof(std::span<const double> observed, std::span<const double> probs,
                         double min_expected = 5.0);
/// Homogeneity test of two count vectors over the same bins.
ChiSquare chi_square_two_sample(std::span<const double> a, std::span<const double> b,
                                double min_expected = 5.0);

/// Asymptotic two-sample Kolmogorov-Smirnov test.
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
double ks_sup_distance(std::vector<double> a, std::vector<double> b);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double r2 = 0.0;
};
/// Weighted least squares y = a + b x. Empty weights mean unit weights.
LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> w = {});

double chi_square_sf(double statistic, double dof);
double normal_quantile(double p);

}  // namespace facetlab
