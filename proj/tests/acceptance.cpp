// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any failure.
// Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "facetlab/chain.hpp"
#include "facetlab/coupling.hpp"
#include "facetlab/ensemble.hpp"
#include "facetlab/errors.hpp"
#include "facetlab/experiment.hpp"
#include "facetlab/majorant.hpp"
#include "facetlab/oracle.hpp"
#include "facetlab/records.hpp"
#include "facetlab/samplers.hpp"
#include "facetlab/sectors.hpp"
#include "facetlab/stats.hpp"

using namespace facetlab;

namespace {

using Key = std::pair<std::size_t, std::int64_t>;
using Counts = std::map<Key, std::uint64_t>;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int workers() { return worker_count(); }

void merge(Counts& into, const Counts& from) {
  for (const auto& [k, c] : from) into[k] += c;
}

// Experiment shared by the scaling criteria.
ExperimentConfig scaling_config() {
  ExperimentConfig c;
  c.lambda = 0.3;
  c.n_grid = {32, 64, 128, 256, 512};
  c.chains = 16;
  c.sweeps = 20000;
  c.burn_in = 5000;
  c.thin = 100;
  c.seed = 20240601;
  c.interior_fraction = 0.5;
  c.indel_fraction = 0.5;
  c.statistics = {"mean_fl", "mean_lr", "max_fl", "max_lr", "length", "excess_area"};
  return c;
}

const ScalingResult& scaling_result() {
  static const ScalingResult r = estimate(scaling_config());
  return r;
}

// 1. Chain and rejection sampler against the exact (length, area) law.
Outcome exact_law() {
  struct Case {
    double lambda;
    std::int64_t n;
    std::size_t len_cap;
    std::int64_t area_cap;
  };
  const std::vector<Case> cases{{0.3, 1, 12, 16}, {0.45, 2, 24, 32}};
  const std::uint64_t proposals = 10'000'000;
  const std::uint64_t accepted = 1'000'000;
  const std::size_t replicas = 8;
  bool ok = true;
  std::string detail;
  for (const auto& cs : cases) {
    const ModelParams params(cs.lambda, cs.n);
    const auto law = exact_length_area_law(params, cs.len_cap, cs.area_cap, 1e-8);
    ok = ok && law.neglected_bound < 1e-8;
    double lumped = 0.0;
    for (const auto& [k, p] : law.table) {
      if (k.first == cs.len_cap || k.second == cs.area_cap) lumped += p;
    }

    std::vector<Counts> chain(replicas);
    std::vector<Counts> rej(replicas);
    parallel_for_replicas(replicas, workers(), [&](std::size_t r) {
      auto s = init_chain(params, RngStream(101, 1000 * static_cast<std::uint64_t>(cs.n) + r));
      RunOptions o;
      o.sweeps = 1;
      o.interior_fraction = 0.5;
      o.indel_fraction = 0.5;
      run(s, 2000, 0.5);
      const std::uint64_t sweeps = proposals / replicas / proposals_per_sweep(params);
      for (std::uint64_t i = 0; i < sweeps; ++i) {
        run(s, o);
        ++chain[r][lumped_key(s.path().length(), s.area(), cs.len_cap, cs.area_cap)];
      }
      RngStream rng(102, 1000 * static_cast<std::uint64_t>(cs.n) + r);
      for (std::uint64_t i = 0; i < accepted / replicas; ++i) {
        const auto d = sample_conditioned_rejection(params, rng, 100'000'000);
        ++rej[r][lumped_key(d.path.length(), d.path.area(), cs.len_cap, cs.area_cap)];
      }
    });
    Counts c;
    Counts q;
    for (std::size_t r = 0; r < replicas; ++r) {
      merge(c, chain[r]);
      merge(q, rej[r]);
    }
    const double tv_chain = total_variation(normalise(c), law.table);
    const double tv_rej = total_variation(normalise(q), law.table);
    ok = ok && tv_chain < 0.02 && tv_rej < 0.01;
    detail += fmt("(%.2f,%lld) L=%zu bound=%.1e cells=%zu lumped=%.3f tv_mcmc=%.4f tv_rejection=%.4f; ",
                  cs.lambda, static_cast<long long>(cs.n), law.truncation, law.neglected_bound, law.table.size(),
                  lumped, tv_chain, tv_rej);
  }
  return {ok, detail};
}

LatticePath random_path(std::size_t len, double p_down, RngStream& rng) {
  StepSequence s;
  for (std::size_t i = 0; i < len; ++i) s.push_back(rng.bernoulli(p_down) ? Step::Down : Step::Right);
  const auto downs = static_cast<std::int64_t>(s.count_down());
  return LatticePath(downs, std::move(s));
}

// 2. Majorant against the gift-wrapping hull.
Outcome hull_oracle() {
  std::uint64_t exhaustive = 0;
  std::uint64_t mismatches = 0;
  for (const auto& p : enumerate_paths(14)) {
    ++exhaustive;
    if (least_concave_majorant(p).ext_points() != brute_majorant(p)) ++mismatches;
  }
  const std::size_t count = 10000;
  std::vector<int> bad(count, 0);
  parallel_for_replicas(count, workers(), [&](std::size_t i) {
    RngStream rng(201, i);
    const double p = 0.2 + 0.6 * rng.uniform();
    const auto path = random_path(10000, p, rng);
    bad[i] = least_concave_majorant(path).ext_points() != brute_majorant(path);
  });
  for (int b : bad) mismatches += static_cast<std::uint64_t>(b);
  return {mismatches == 0,
          fmt("%llu exhaustive paths + %zu random paths of length 10000, mismatches=%llu",
              static_cast<unsigned long long>(exhaustive), count, static_cast<unsigned long long>(mismatches))};
}

// 3. Monotone coupling: domination and the lower chain's stationary law.
Outcome coupling() {
  std::uint64_t violations = 0;
  std::uint64_t steps = 0;
  for (std::int64_t span : {64, 256}) {
    const Point a{0, span / 2};
    const Point b{span / 2, 0};
    RngStream rng(301, static_cast<std::uint64_t>(span));
    for (int rep = 0; rep < 4; ++rep) {
      const auto start = sample_bridge_below(a, b, rng);
      const std::int64_t floor = start.inversions() - span / 4;
      MonotoneCoupling c(start, floor, rng.child(static_cast<std::uint64_t>(rep)));
      for (int i = 0; i < 100000; ++i) {
        c.step();
        ++steps;
        if (!c.dominated() || c.upper().inversions() < floor) ++violations;
      }
    }
  }

  const Point a{0, 5};
  const Point b{5, 0};
  const std::size_t samples = 1'000'000;
  std::map<std::string, std::uint64_t> lower;
  std::map<std::string, std::uint64_t> direct;
  RngStream rng(302, 0);
  BelowChordSampler sampler(a, b, rng);
  const auto start = sampler.draw(rng);
  MonotoneCoupling c(start, start.inversions(), rng.child(1));
  for (int i = 0; i < 5000; ++i) c.step();
  for (std::size_t i = 0; i < samples; ++i) {
    for (int k = 0; k < 20; ++k) c.step();
    ++lower[c.lower().steps().to_string()];
    ++direct[sampler.draw(rng).steps().to_string()];
  }
  const double tv = total_variation(normalise(lower), normalise(direct));
  return {violations == 0 && tv < 0.02 && !sampler.approximate(),
          fmt("%llu coupled steps on spans 64,256, violations=%llu; span 10 lower-chain TV=%.4f over %zu states",
              static_cast<unsigned long long>(steps), static_cast<unsigned long long>(violations), tv,
              direct.size())};
}

// 4. Exponents of the mean statistics.
Outcome mean_exponents() {
  const auto& r = scaling_result();
  const auto& fl = r.fits.at("mean_fl");
  const auto& lr = r.fits.at("mean_lr");
  const bool ok = std::abs(fl.slope - 2.0 / 3.0) <= 0.10 && std::abs(lr.slope - 1.0 / 3.0) <= 0.10 &&
                  (fl.ci_lo > 0.5 || fl.ci_hi < 0.5) && (lr.ci_lo > 2.0 / 3.0 || lr.ci_hi < 2.0 / 3.0);
  return {ok, fmt("MeanFL slope %.3f CI [%.3f, %.3f]; MeanLR slope %.3f CI [%.3f, %.3f]", fl.slope, fl.ci_lo,
                  fl.ci_hi, lr.slope, lr.ci_lo, lr.ci_hi)};
}

// 5. Logarithmic correction of the maximal statistics.
Outcome log_correction() {
  const auto& r = scaling_result();
  auto check = [&](const char* stat, double power, double log_power, std::string& detail) {
    const auto& rows = r.rows.at(stat);
    std::vector<double> corrected;
    std::vector<double> plain;
    for (const auto& row : rows) {
      const double n = static_cast<double>(row.n);
      plain.push_back(row.median / std::pow(n, power));
      corrected.push_back(plain.back() / std::pow(std::log(n), log_power));
    }
    const auto [lo, hi] = std::minmax_element(corrected.begin(), corrected.end());
    const double spread = *hi / *lo;
    bool increasing = true;
    for (std::size_t i = 1; i < plain.size(); ++i) increasing = increasing && plain[i] > plain[i - 1];
    detail += fmt("%s corrected spread %.3f, plain ratios", stat, spread);
    for (double v : plain) detail += fmt(" %.3f", v);
    detail += "; ";
    return spread < 2.0 && increasing;
  };
  std::string detail;
  const bool a = check("max_fl", 2.0 / 3.0, 1.0 / 3.0, detail);
  const bool b = check("max_lr", 1.0 / 3.0, 2.0 / 3.0, detail);
  return {a && b, detail};
}

// 6. Exponential tail of the excess area.
Outcome excess_tail() {
  ExperimentConfig c = scaling_config();
  c.n_grid = {64};
  c.chains = 32;
  c.sweeps = 100000;
  c.thin = 20;
  c.seed = 6;
  std::vector<double> t;
  for (int i = 2; i <= 16; ++i) t.push_back(0.5 * i);
  const auto rows = tail_curve(c, "excess_area", t);
  bool decreasing = true;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> w;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].hits == 0) return {false, fmt("no samples beyond t=%.1f", rows[i].t)};
    if (i > 0) decreasing = decreasing && rows[i].survival < rows[i - 1].survival;
    x.push_back(rows[i].t);
    y.push_back(std::log(rows[i].survival));
    w.push_back(static_cast<double>(rows[i].hits) / std::max(1e-12, 1.0 - rows[i].survival));
  }
  const auto f = fit_line(x, y, w);
  return {decreasing && f.slope < 0.0 && f.r2 > 0.9,
          fmt("P[excess >= N] = %.3g, P[excess >= 8N] = %.3g, slope %.3f, R2 %.4f, %llu samples",
              rows.front().survival, rows.back().survival, f.slope, f.r2,
              static_cast<unsigned long long>(rows.front().total))};
}

// 7. Geometric length law and linear length under conditioning.
Outcome length_law() {
  const ModelParams params(0.3, 1);
  const double r = 2.0 * params.lambda();
  const std::size_t bins = 40;
  std::vector<double> obs(bins + 1, 0.0);
  std::vector<double> probs(bins + 1, 0.0);
  RngStream rng(701, 0);
  for (int i = 0; i < 1'000'000; ++i) obs[std::min(sample_free(params, rng).length(), bins)] += 1.0;
  for (std::size_t k = 0; k < bins; ++k) probs[k] = std::pow(r, static_cast<double>(k)) * (1.0 - r);
  probs[bins] = std::pow(r, static_cast<double>(bins));
  const auto chi = chi_square_gof(obs, probs);

  const auto& rows = scaling_result().rows.at("length");
  double l64 = 0.0;
  double l128 = 0.0;
  for (const auto& row : rows) {
    if (row.n == 64) l64 = row.mean / 64.0;
    if (row.n == 128) l128 = row.mean / 128.0;
  }
  const double ratio = std::max(l64, l128) / std::min(l64, l128);
  return {chi.p_value > 1e-3 && ratio < 1.5,
          fmt("free length chi2=%.1f dof=%zu p=%.3f; E|G|/N = %.3f (N=64), %.3f (N=128), ratio %.3f",
              chi.statistic, chi.dof, chi.p_value, l64, l128, ratio)};
}

// 8. Area-capture probabilities of uniform diagonal bridges.
Outcome event_floors() {
  const std::vector<std::int64_t> spans{64, 256, 1024};
  const std::vector<double> etas{0.02, 0.05, 0.1};
  const std::size_t samples = 200000;
  const std::size_t replicas = 16;
  std::vector<double> gac(spans.size());
  std::vector<std::vector<double>> log_gac(spans.size(), std::vector<double>(etas.size()));
  for (std::size_t s = 0; s < spans.size(); ++s) {
    const Point a{0, spans[s] / 2};
    const Point b{spans[s] / 2, 0};
    std::vector<std::uint64_t> hits(replicas * (1 + etas.size()), 0);
    parallel_for_replicas(replicas, workers(), [&](std::size_t r) {
      RngStream rng(801, 100 * s + r);
      for (std::size_t i = 0; i < samples / replicas; ++i) {
        const auto br = sample_bridge_uniform(a, b, rng);
        hits[r * (1 + etas.size())] += gac_check(br, 0.05).holds;
        for (std::size_t e = 0; e < etas.size(); ++e) hits[r * (1 + etas.size()) + 1 + e] += log_gac_check(br, etas[e]).holds;
      }
    });
    std::vector<std::uint64_t> tot(1 + etas.size(), 0);
    for (std::size_t r = 0; r < replicas; ++r) {
      for (std::size_t k = 0; k <= etas.size(); ++k) tot[k] += hits[r * (1 + etas.size()) + k];
    }
    gac[s] = static_cast<double>(tot[0]) / static_cast<double>(samples);
    for (std::size_t e = 0; e < etas.size(); ++e) log_gac[s][e] = static_cast<double>(tot[1 + e]) / static_cast<double>(samples);
  }
  const auto [lo, hi] = std::minmax_element(gac.begin(), gac.end());
  const double spread = *lo > 0.0 ? *hi / *lo : INFINITY;
  std::vector<double> x;
  std::vector<double> y;
  bool positive = true;
  for (std::size_t s = 0; s < spans.size(); ++s) {
    for (std::size_t e = 0; e < etas.size(); ++e) {
      positive = positive && log_gac[s][e] > 0.0;
      x.push_back(etas[e] * etas[e] * std::log(static_cast<double>(spans[s])));
      y.push_back(std::log(std::max(log_gac[s][e], 1e-300)));
    }
  }
  const auto f = fit_line(x, y);
  std::string detail = "P[GAC(0.05)] =";
  for (double g : gac) detail += fmt(" %.4f", g);
  detail += fmt(" (spread %.3f); log P[LogGAC] vs eta^2 log span: slope %.2f, R2 %.4f", spread, f.slope, f.r2);
  return {spread < 2.0 && positive && f.r2 > 0.9, detail};
}

// 9. Resampling invariance and the multivalued-map inequality.
Outcome invariance() {
  bool ok = true;
  std::string detail;

  // Exact draws at N = 2 through the resampling steps.
  const ModelParams params(0.3, 2);
  const std::size_t len_cap = 16;
  const std::int64_t area_cap = 24;
  const auto law = exact_length_area_law(params, len_cap, area_cap, 1e-8);
  const auto grid = build_sector_grid(2, 0.5, 2.0 / 27.0);
  const std::size_t m = grid.m();
  const std::size_t draws = 400000;
  const std::size_t replicas = 16;
  std::vector<std::vector<Counts>> after(replicas, std::vector<Counts>(m + 1));
  std::vector<std::uint64_t> acted(replicas, 0);
  parallel_for_replicas(replicas, workers(), [&](std::size_t r) {
    RngStream rng(901, r);
    for (std::size_t i = 0; i < draws / replicas; ++i) {
      const auto p = sample_conditioned_rejection(params, rng, 100'000'000).path;
      for (std::size_t j = 1; j <= m; ++j) {
        ChainState st(params, p, rng.child(i * 64 + j));
        acted[r] += res_j(st, grid, j).acted;
        ++after[r][j][lumped_key(st.path().length(), st.area(), len_cap, area_cap)];
      }
      ChainState st(params, p, rng.child(i * 64));
      full_res(st, grid);
      ++after[r][0][lumped_key(st.path().length(), st.area(), len_cap, area_cap)];
    }
  });
  double worst = 0.0;
  std::uint64_t total_acted = 0;
  for (std::size_t j = 0; j <= m; ++j) {
    Counts c;
    for (std::size_t r = 0; r < replicas; ++r) merge(c, after[r][j]);
    worst = std::max(worst, total_variation(normalise(c), law.table));
  }
  for (auto a : acted) total_acted += a;
  ok = ok && worst < 0.02 && law.neglected_bound < 1e-8;
  detail += fmt("N=2: %zu sectors, worst TV %.4f (%llu acting moves); ", m, worst,
                static_cast<unsigned long long>(total_acted));

  // Chain samples at N = 32: untouched chains against resampled chains.
  const ModelParams p32(0.3, 32);
  const auto g32 = build_sector_grid(32, 0.5, 2.0 / 27.0);
  const std::size_t chains = 400;
  const std::size_t per_chain = 10;
  std::vector<std::vector<ChainRecord>> rec(chains);
  std::vector<std::uint64_t> act32(chains, 0);
  parallel_for_replicas(chains, workers(), [&](std::size_t c) {
    auto s = init_chain(p32, RngStream(902, c));
    RunOptions o;
    o.interior_fraction = 0.5;
    o.indel_fraction = 0.5;
    o.sweeps = 3000;
    run(s, o);
    o.sweeps = 300;
    for (std::size_t k = 0; k < per_chain; ++k) {
      run(s, o);
      if (c % 2 == 0) {
        rec[c].push_back(make_record(s.path(), p32, 902, c, s.sweep_count()));
      } else {
        ChainState copy(p32, s.path(), RngStream(903, c * per_chain + k));
        act32[c] += full_res(copy, g32).acted;
        rec[c].push_back(make_record(copy.path(), p32, 902, c, s.sweep_count()));
      }
    }
  });
  double min_p = 1.0;
  std::uint64_t acted32 = 0;
  for (auto a : act32) acted32 += a;
  for (const char* stat : {"excess_area", "length", "max_fl", "mean_lr"}) {
    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t c = 0; c < chains; ++c) {
      for (const auto& r : rec[c]) (c % 2 == 0 ? a : b).push_back(statistic_value(r, stat));
    }
    const auto ks = ks_two_sample(a, b);
    min_p = std::min(min_p, ks.p_value);
    detail += fmt("%s KS p=%.3f, ", stat, ks.p_value);
  }
  ok = ok && min_p > 1e-3 && acted32 > 0;
  detail += fmt("N=32 acting moves %llu; ", static_cast<unsigned long long>(acted32));

  // Inequality on surgery maps and fuzzed maps.
  std::size_t maps = 0;
  std::size_t failed = 0;
  for (std::size_t h : {1, 2}) {
    for (std::size_t k : {3, 4, 5}) {
      SurgAuditSpec spec;
      spec.cone = Cone(0.05, 0.6);
      spec.epsilon = 0.3;
      spec.k = k;
      spec.h = h;
      spec.max_length = 12;
      const auto map = surg_multivalued_map(params, spec);
      if (map.images.empty()) continue;
      ++maps;
      failed += !mvmp_audit(map).holds;
    }
  }
  const std::size_t surgery = maps;
  RngStream rng(904, 0);
  for (int i = 0; i < 10000; ++i) {
    const auto map = random_multivalued_map(1 + rng.uniform_below(16), 1 + rng.uniform_below(16), rng);
    ++maps;
    failed += !mvmp_audit(map).holds;
  }
  ok = ok && failed == 0 && surgery > 0;
  detail += fmt("inequality on %zu surgery + %zu fuzzed maps, failures %zu", surgery, maps - surgery, failed);
  return {ok, detail};
}

// 10. Byte-identical reruns.
Outcome determinism() {
  ExperimentConfig c;
  c.n_grid = {16, 24, 32, 48};
  c.chains = 6;
  c.sweeps = 400;
  c.burn_in = 100;
  c.thin = 20;
  c.seed = 10;
  c.statistics = statistic_names();
  const auto dir = std::filesystem::temp_directory_path() / "facetlab_acceptance_determinism";
  std::filesystem::remove_all(dir);
  c.output_dir = dir.string();
  auto snapshot = [&] {
    std::map<std::string, std::string> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
      if (e.is_regular_file()) files[std::filesystem::relative(e.path(), dir).string()] = read_file(e.path().string());
    }
    return files;
  };
  estimate(c);
  const auto first = snapshot();
  estimate(c);
  const auto second = snapshot();
  std::filesystem::remove_all(dir);
  return {!first.empty() && first == second, fmt("%zu output files compared", first.size())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"exact law agreement", exact_law},
      {"hull oracle equivalence", hull_oracle},
      {"coupling invariant", coupling},
      {"mean-statistic exponents", mean_exponents},
      {"log-correction signature", log_correction},
      {"excess-area tail", excess_tail},
      {"length law", length_law},
      {"event-probability floors", event_floors},
      {"invariance audits", invariance},
      {"determinism", determinism},
  };
  std::set<std::size_t> only;
  for (int i = 1; i < argc; ++i) only.insert(static_cast<std::size_t>(std::stoul(argv[i])));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.count(i + 1)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s [%zu] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
