#include "facetlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "facetlab/errors.hpp"

namespace facetlab {

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw Error(ErrorCode::InsufficientData, "quantile of an empty sample");
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

double integrated_autocorr_time(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) return 1.0;
  const double v = variance(x);
  if (v <= 0.0) return 1.0;
  const auto b = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))));
  const std::size_t nb = n / b;
  if (nb < 2) return 1.0;
  std::vector<double> bm(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    bm[k] = mean(x.subspan(k * b, b));
  }
  return std::max(1.0, static_cast<double>(b) * variance(bm) / v);
}

double chi_square_sf(double statistic, double dof) {
  if (dof <= 0.0) return 1.0;
  if (statistic <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), statistic));
}

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

ChiSquare chi_square_gof(std::span<const double> observed, std::span<const double> probs,
                         double min_expected) {
  if (observed.size() != probs.size()) {
    throw Error(ErrorCode::InvalidParams, "observed and expected tables differ in size");
  }
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  std::vector<double> o;
  std::vector<double> e;
  double acc_o = 0.0;
  double acc_e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    acc_o += observed[i];
    acc_e += probs[i] * total;
    if (acc_e >= min_expected) {
      o.push_back(acc_o);
      e.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (e.empty()) {
      o.push_back(acc_o);
      e.push_back(acc_e);
    } else {
      o.back() += acc_o;
      e.back() += acc_e;
    }
  }
  ChiSquare r;
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (e[i] > 0.0) r.statistic += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
  }
  r.dof = o.size() > 1 ? o.size() - 1 : 0;
  r.p_value = chi_square_sf(r.statistic, static_cast<double>(r.dof));
  return r;
}

ChiSquare chi_square_two_sample(std::span<const double> a, std::span<const double> b,
                                double min_expected) {
  if (a.size() != b.size()) throw Error(ErrorCode::InvalidParams, "tables differ in size");
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  const double n = na + nb;
  std::vector<double> pa;
  std::vector<double> pb;
  double acc_a = 0.0;
  double acc_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc_a += a[i];
    acc_b += b[i];
    const double row = acc_a + acc_b;
    if (std::min(row * na / n, row * nb / n) >= min_expected) {
      pa.push_back(acc_a);
      pb.push_back(acc_b);
      acc_a = acc_b = 0.0;
    }
  }
  if (acc_a + acc_b > 0.0) {
    if (pa.empty()) {
      pa.push_back(acc_a);
      pb.push_back(acc_b);
    } else {
      pa.back() += acc_a;
      pb.back() += acc_b;
    }
  }
  ChiSquare r;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double row = pa[i] + pb[i];
    const double ea = row * na / n;
    const double eb = row * nb / n;
    if (ea > 0.0) r.statistic += (pa[i] - ea) * (pa[i] - ea) / ea;
    if (eb > 0.0) r.statistic += (pb[i] - eb) * (pb[i] - eb) / eb;
  }
  r.dof = pa.size() > 1 ? pa.size() - 1 : 0;
  r.p_value = chi_square_sf(r.statistic, static_cast<double>(r.dof));
  return r;
}

double ks_sup_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::InsufficientData, "empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  KsResult r;
  r.statistic = ks_sup_distance(std::move(a), std::move(b));
  const double ne = na * nb / (na + nb);
  const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * r.statistic;
  if (lam < 1e-3) {
    r.p_value = 1.0;
  } else {
    // Kolmogorov survival function 2 sum (-1)^{k-1} exp(-2 k^2 lam^2).
    double q = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lam * lam);
      q += (k % 2 == 1 ? 2.0 : -2.0) * term;
      if (term < 1e-16) break;
    }
    r.p_value = std::clamp(q, 0.0, 1.0);
  }
  return r;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return Interval{0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return Interval{std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n || (!w.empty() && w.size() != n)) {
    throw Error(ErrorCode::InsufficientData, "line fit needs at least two matched points");
  }
  auto wt = [&](std::size_t i) { return w.empty() ? 1.0 : w[i]; };
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += wt(i);
    sx += wt(i) * x[i];
    sy += wt(i) * y[i];
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += wt(i) * (x[i] - mx) * (x[i] - mx);
    sxy += wt(i) * (x[i] - mx) * (y[i] - my);
    syy += wt(i) * (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw Error(ErrorCode::InsufficientData, "degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    rss += wt(i) * r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - rss / syy : 1.0;
  if (n > 2) {
    if (w.empty()) {
      f.slope_se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    } else {
      // Inverse-variance weights: the slope variance is 1 / sxx.
      f.slope_se = std::sqrt(1.0 / sxx);
    }
  }
  return f;
}

}  // namespace facetlab
