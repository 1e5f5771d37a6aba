#include "facetlab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <set>
#include <sstream>

#include "facetlab/errors.hpp"
#include "json.hpp"

namespace facetlab {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(v);
  while (std::getline(ss, cur, ',')) {
    const auto t = trim(cur);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, key + ": not a number: " + v);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw Error(ErrorCode::ConfigError, key + ": not an unsigned integer: " + v);
  }
  return out;
}

double scale_factor(const ExperimentConfig& c, std::int64_t n) {
  const auto n0 = *std::min_element(c.n_grid.begin(), c.n_grid.end());
  return std::pow(static_cast<double>(n) / static_cast<double>(n0), c.sweep_exponent);
}

std::uint64_t scaled(std::uint64_t v, double f) {
  return static_cast<std::uint64_t>(std::llround(static_cast<double>(v) * f));
}

RunOptions move_options(const ExperimentConfig& c) {
  RunOptions o;
  o.interior_fraction = c.interior_fraction;
  o.indel_fraction = c.indel_fraction;
  o.gibbs_per_sweep = c.gibbs_per_sweep;
  o.window_c = c.window_c;
  return o;
}

std::vector<double> chain_means(const std::vector<std::vector<ChainRecord>>& chains, const std::string& stat) {
  std::vector<double> out;
  for (const auto& ch : chains) {
    std::vector<double> v;
    for (const auto& r : ch) v.push_back(statistic_value(r, stat));
    if (!v.empty()) out.push_back(mean(v));
  }
  return out;
}

LineFit loglog_fit(const std::vector<double>& logn, const std::vector<double>& means,
                   const std::vector<double>& ses) {
  std::vector<double> y;
  std::vector<double> w;
  bool weighted = true;
  for (std::size_t i = 0; i < means.size(); ++i) {
    y.push_back(std::log(means[i]));
    const double rel = ses[i] / means[i];
    if (!(rel > 0.0)) weighted = false;
    w.push_back(rel > 0.0 ? 1.0 / (rel * rel) : 0.0);
  }
  if (!weighted) w.clear();
  return fit_line(logn, y, w);
}

void check_fit_rows(const std::vector<FitRow>& rows) {
  if (rows.size() < 4) throw Error(ErrorCode::InsufficientData, "exponent fit needs at least four grid points");
  for (const auto& r : rows) {
    if (!(r.mean > 0.0)) throw Error(ErrorCode::NonPositiveMean, "log-log fit needs positive means");
    if (!(r.n > 0.0)) throw Error(ErrorCode::InsufficientData, "grid points must be positive");
  }
}

struct Pt {
  double x;
  double y;
};

double seg_dist(Pt p, Pt a, Pt b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double l2 = dx * dx + dy * dy;
  double t = l2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - a.x - t * dx, p.y - a.y - t * dy);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(lambda > 0.0 && lambda < 0.5)) throw Error(ErrorCode::ConfigError, "lambda must lie in (0, 1/2)");
  if (n_grid.empty()) throw Error(ErrorCode::ConfigError, "n_grid is empty");
  for (auto n : n_grid) {
    if (n < 1) throw Error(ErrorCode::ConfigError, "grid values must be positive");
  }
  if (chains == 0) throw Error(ErrorCode::ConfigError, "chains must be positive");
  if (thin == 0) throw Error(ErrorCode::ConfigError, "thin must be positive");
  if (sweeps < thin) throw Error(ErrorCode::ConfigError, "sweeps must be at least thin");
  if (!(sweep_exponent >= 0.0)) throw Error(ErrorCode::ConfigError, "sweep_exponent must be non-negative");
  if (!(chi > 0.0)) throw Error(ErrorCode::ConfigError, "chi must be positive");
  if (!(eta >= 0.0)) throw Error(ErrorCode::ConfigError, "eta must be non-negative");
  if (!(epsilon >= 0.0 && epsilon < std::numbers::pi / 4.0)) throw Error(ErrorCode::ConfigError, "epsilon out of range");
  if (!(epsilon1 > 0.0 && epsilon1 < 2.0 / 3.0)) throw Error(ErrorCode::ConfigError, "epsilon1 must lie in (0, 2/3)");
  if (!(k1 > 0.0 && k2 >= 0.0 && k2 < k1)) throw Error(ErrorCode::ConfigError, "need 0 <= k2 < k1");
  for (double f : {interior_fraction, indel_fraction}) {
    if (!(f >= 0.0 && f <= 1.0)) throw Error(ErrorCode::ConfigError, "move fractions must lie in [0, 1]");
  }
  if (!(gibbs_per_sweep >= 0.0)) throw Error(ErrorCode::ConfigError, "gibbs_per_sweep must be non-negative");
  if (!(window_c > 0.0)) throw Error(ErrorCode::ConfigError, "window_c must be positive");
  for (const auto& s : statistics) statistic_scale_exponent(s);
}

std::string config_to_string(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "# facetlab experiment\n";
  o << "version = " << ExperimentConfig::kVersion << '\n';
  o << "lambda = " << fmt_double(c.lambda) << '\n';
  o << "n_grid = ";
  for (std::size_t i = 0; i < c.n_grid.size(); ++i) o << (i ? "," : "") << c.n_grid[i];
  o << '\n';
  o << "chains = " << c.chains << '\n';
  o << "sweeps = " << c.sweeps << '\n';
  o << "burn_in = " << c.burn_in << '\n';
  o << "thin = " << c.thin << '\n';
  o << "sweep_exponent = " << fmt_double(c.sweep_exponent) << '\n';
  o << "seed = " << c.seed << '\n';
  o << "chi = " << fmt_double(c.chi) << '\n';
  o << "eta = " << fmt_double(c.eta) << '\n';
  o << "epsilon = " << fmt_double(c.epsilon) << '\n';
  o << "epsilon1 = " << fmt_double(c.epsilon1) << '\n';
  o << "k1 = " << fmt_double(c.k1) << '\n';
  o << "k2 = " << fmt_double(c.k2) << '\n';
  o << "interior_fraction = " << fmt_double(c.interior_fraction) << '\n';
  o << "indel_fraction = " << fmt_double(c.indel_fraction) << '\n';
  o << "gibbs_per_sweep = " << fmt_double(c.gibbs_per_sweep) << '\n';
  o << "window_c = " << fmt_double(c.window_c) << '\n';
  o << "output_dir = " << c.output_dir << '\n';
  o << "statistics = ";
  for (std::size_t i = 0; i < c.statistics.size(); ++i) o << (i ? "," : "") << c.statistics[i];
  o << '\n';
  return o.str();
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  std::set<std::string> seen;
  bool versioned = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string val = trim(std::string_view(t).substr(eq + 1));
    if (!seen.insert(key).second) throw Error(ErrorCode::ConfigError, "duplicate key " + key);
    if (key == "version") {
      if (parse_u64(key, val) != ExperimentConfig::kVersion) {
        throw Error(ErrorCode::ConfigError, "unsupported config version " + val);
      }
      versioned = true;
    } else if (key == "lambda") {
      c.lambda = parse_double(key, val);
    } else if (key == "n_grid") {
      c.n_grid.clear();
      for (const auto& s : split_list(val)) c.n_grid.push_back(static_cast<std::int64_t>(parse_u64(key, s)));
    } else if (key == "chains") {
      c.chains = parse_u64(key, val);
    } else if (key == "sweeps") {
      c.sweeps = parse_u64(key, val);
    } else if (key == "burn_in") {
      c.burn_in = parse_u64(key, val);
    } else if (key == "thin") {
      c.thin = parse_u64(key, val);
    } else if (key == "sweep_exponent") {
      c.sweep_exponent = parse_double(key, val);
    } else if (key == "seed") {
      c.seed = parse_u64(key, val);
    } else if (key == "chi") {
      c.chi = parse_double(key, val);
    } else if (key == "eta") {
      c.eta = parse_double(key, val);
    } else if (key == "epsilon") {
      c.epsilon = parse_double(key, val);
    } else if (key == "epsilon1") {
      c.epsilon1 = parse_double(key, val);
    } else if (key == "k1") {
      c.k1 = parse_double(key, val);
    } else if (key == "k2") {
      c.k2 = parse_double(key, val);
    } else if (key == "interior_fraction") {
      c.interior_fraction = parse_double(key, val);
    } else if (key == "indel_fraction") {
      c.indel_fraction = parse_double(key, val);
    } else if (key == "gibbs_per_sweep") {
      c.gibbs_per_sweep = parse_double(key, val);
    } else if (key == "window_c") {
      c.window_c = parse_double(key, val);
    } else if (key == "output_dir") {
      c.output_dir = val;
    } else if (key == "statistics") {
      c.statistics = split_list(val);
    } else {
      throw Error(ErrorCode::ConfigError, "unknown key " + key);
    }
  }
  if (!versioned) throw Error(ErrorCode::ConfigError, "missing version");
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& file) {
  std::string text;
  try {
    text = read_file(file);
  } catch (const Error&) {
    throw Error(ErrorCode::ConfigError, "cannot read config " + file);
  }
  return parse_config(text);
}

void save_config(const std::string& file, const ExperimentConfig& c) {
  write_file_atomic(file, config_to_string(c));
}

std::vector<ChainTask> experiment_tasks(const ExperimentConfig& c) {
  c.validate();
  std::vector<ChainTask> tasks;
  for (auto n : c.n_grid) {
    const double f = scale_factor(c, n);
    for (std::uint64_t k = 0; k < c.chains; ++k) {
      ChainTask t;
      t.lambda = c.lambda;
      t.n = n;
      t.seed = c.seed;
      t.chain = k;
      t.burn_in = scaled(c.burn_in, f);
      t.thin = std::max<std::uint64_t>(1, scaled(c.thin, f));
      t.samples = c.sweeps / c.thin;
      t.moves = move_options(c);
      tasks.push_back(t);
    }
  }
  return tasks;
}

ScalingResult summarise(const ExperimentConfig& c, const std::vector<ChainOutput>& outputs) {
  ScalingResult r;
  std::size_t idx = 0;
  for (auto n : c.n_grid) {
    auto& per_n = r.records[n];
    for (std::uint64_t k = 0; k < c.chains; ++k) per_n.push_back(outputs.at(idx++).records);
  }
  for (const auto& stat : c.statistics) {
    std::vector<std::int64_t> ns;
    std::vector<std::vector<double>> cms;
    for (auto n : c.n_grid) {
      const auto& chains = r.records[n];
      StatisticRow row;
      row.n = n;
      const auto cm = chain_means(chains, stat);
      std::vector<double> all;
      for (const auto& ch : chains) {
        for (const auto& rec : ch) all.push_back(statistic_value(rec, stat));
      }
      row.samples = all.size();
      row.mean = mean(all);
      row.median = all.empty() ? 0.0 : median(all);
      row.se = cm.size() > 1 ? std::sqrt(variance(cm) / static_cast<double>(cm.size())) : 0.0;
      r.rows[stat].push_back(row);
      ns.push_back(n);
      cms.push_back(cm);
    }
    const std::set<std::int64_t> distinct(ns.begin(), ns.end());
    bool positive = true;
    for (const auto& row : r.rows[stat]) positive = positive && row.mean > 0.0;
    if (distinct.size() >= 4 && positive) r.fits[stat] = fit_exponent_chains(ns, cms, 2000, c.seed);
  }
  return r;
}

ScalingResult estimate(const ExperimentConfig& c) {
  const auto outputs = run_chains(experiment_tasks(c));
  auto r = summarise(c, outputs);
  if (!c.output_dir.empty()) write_outputs(c, r);
  return r;
}

std::string summary_json(const ExperimentConfig& c, const ScalingResult& r) {
  nlohmann::ordered_json j;
  j["version"] = ExperimentConfig::kVersion;
  j["config"] = config_to_string(c);
  nlohmann::ordered_json stats = nlohmann::ordered_json::object();
  for (const auto& [name, rows] : r.rows) {
    nlohmann::ordered_json s;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
      arr.push_back({{"N", row.n}, {"mean", row.mean}, {"se", row.se}, {"median", row.median},
                     {"samples", row.samples}});
    }
    s["rows"] = arr;
    if (const auto it = r.fits.find(name); it != r.fits.end()) {
      const auto& f = it->second;
      s["fit"] = {{"slope", f.slope}, {"intercept", f.intercept}, {"slope_se", f.slope_se},
                  {"ci_lo", f.ci_lo}, {"ci_hi", f.ci_hi}, {"r2", f.r2}};
    }
    stats[name] = s;
  }
  j["statistics"] = stats;
  return j.dump(2) + "\n";
}

void write_outputs(const ExperimentConfig& c, const ScalingResult& r) {
  const std::filesystem::path dir(c.output_dir);
  for (const auto& [n, chains] : r.records) {
    for (std::size_t k = 0; k < chains.size(); ++k) {
      std::string text;
      for (const auto& rec : chains[k]) text += to_json_line(rec) + "\n";
      const auto file = dir / "raw" / ("N" + std::to_string(n) + "_chain" + std::to_string(k) + ".jsonl");
      write_file_atomic(file.string(), text);
    }
  }
  write_file_atomic((dir / "summary.json").string(), summary_json(c, r));
}

ExponentFit fit_exponent(const std::vector<FitRow>& rows, std::size_t bootstrap, std::uint64_t seed) {
  check_fit_rows(rows);
  std::vector<double> x;
  std::vector<double> m;
  std::vector<double> s;
  for (const auto& r : rows) {
    x.push_back(std::log(r.n));
    m.push_back(r.mean);
    s.push_back(r.se);
  }
  const auto f = loglog_fit(x, m, s);
  ExponentFit out{f.slope, f.intercept, f.slope_se, f.slope, f.slope, f.r2};
  if (bootstrap == 0) return out;
  RngStream rng(seed, 0xB007);
  std::vector<double> slopes;
  slopes.reserve(bootstrap);
  std::vector<double> mb(m.size());
  for (std::size_t b = 0; b < bootstrap; ++b) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      // Log-normal resampling keeps means positive.
      const double rel = m[i] > 0.0 ? s[i] / m[i] : 0.0;
      const double z = normal_quantile(rng.uniform_open() * (1.0 - 1e-16));
      mb[i] = m[i] * std::exp(rel * z);
    }
    slopes.push_back(loglog_fit(x, mb, s).slope);
  }
  out.ci_lo = quantile(slopes, 0.025);
  out.ci_hi = quantile(slopes, 0.975);
  return out;
}

ExponentFit fit_exponent_chains(const std::vector<std::int64_t>& n,
                                const std::vector<std::vector<double>>& chain_means,
                                std::size_t bootstrap, std::uint64_t seed) {
  std::vector<FitRow> rows;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const auto& cm = chain_means[i];
    if (cm.empty()) throw Error(ErrorCode::InsufficientData, "grid point without chains");
    const double se = cm.size() > 1 ? std::sqrt(variance(cm) / static_cast<double>(cm.size())) : 0.0;
    rows.push_back(FitRow{static_cast<double>(n[i]), mean(cm), se});
  }
  auto out = fit_exponent(rows, 0, seed);
  if (bootstrap == 0) return out;
  std::vector<double> x;
  std::vector<double> se;
  for (const auto& r : rows) {
    x.push_back(std::log(r.n));
    se.push_back(r.se);
  }
  RngStream rng(seed, 0xC4A1);
  std::vector<double> slopes;
  slopes.reserve(bootstrap);
  std::vector<double> mb(rows.size());
  for (std::size_t b = 0; b < bootstrap; ++b) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& cm = chain_means[i];
      double s = 0.0;
      for (std::size_t k = 0; k < cm.size(); ++k) s += cm[rng.uniform_below(cm.size())];
      mb[i] = s / static_cast<double>(cm.size());
    }
    if (std::any_of(mb.begin(), mb.end(), [](double v) { return !(v > 0.0); })) continue;
    slopes.push_back(loglog_fit(x, mb, se).slope);
  }
  if (!slopes.empty()) {
    out.ci_lo = quantile(slopes, 0.025);
    out.ci_hi = quantile(slopes, 0.975);
  }
  return out;
}

std::vector<TailRow> tail_curve(const std::vector<ChainRecord>& records, std::string_view statistic,
                                const std::vector<double>& thresholds) {
  const double p = statistic_scale_exponent(statistic);
  std::vector<double> v;
  v.reserve(records.size());
  for (const auto& r : records) {
    v.push_back(statistic_value(r, statistic) / std::pow(static_cast<double>(r.n), p));
  }
  std::vector<TailRow> out;
  for (double t : thresholds) {
    TailRow row;
    row.t = t;
    row.total = v.size();
    row.hits = static_cast<std::uint64_t>(std::count_if(v.begin(), v.end(), [t](double x) { return x >= t; }));
    row.survival = row.total ? static_cast<double>(row.hits) / static_cast<double>(row.total) : 0.0;
    const auto ci = wilson_interval(row.hits, row.total);
    row.lo = ci.lo;
    row.hi = ci.hi;
    out.push_back(row);
  }
  return out;
}

std::vector<TailRow> tail_curve(const ExperimentConfig& c, std::string_view statistic,
                                const std::vector<double>& thresholds) {
  statistic_scale_exponent(statistic);
  if (thresholds.empty()) return {};
  ExperimentConfig one = c;
  one.n_grid = {c.n_grid.front()};
  const auto outputs = run_chains(experiment_tasks(one));
  std::vector<ChainRecord> all;
  for (const auto& o : outputs) all.insert(all.end(), o.records.begin(), o.records.end());
  return tail_curve(all, statistic, thresholds);
}

double radial_position(const LatticePath& path, double theta, std::int64_t n) {
  const auto v = path.vertices();
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  auto side = [&](Point p) { return c * static_cast<double>(p.y) - s * static_cast<double>(p.x); };
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double si = side(v[i]);
    if (si > 0.0) continue;
    double x = static_cast<double>(v[i].x);
    double y = static_cast<double>(v[i].y);
    if (i > 0 && si < 0.0) {
      const double sp = side(v[i - 1]);
      const double t = sp / (sp - si);
      x = static_cast<double>(v[i - 1].x) + t * static_cast<double>(v[i].x - v[i - 1].x);
      y = static_cast<double>(v[i - 1].y) + t * static_cast<double>(v[i].y - v[i - 1].y);
    }
    return std::hypot(x, y) / static_cast<double>(n);
  }
  return 0.0;
}

double concavity_defect(const std::vector<double>& angles, const std::vector<double>& radii) {
  std::vector<Pt> pts;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    pts.push_back(Pt{radii[i] * std::cos(angles[i]), radii[i] * std::sin(angles[i])});
  }
  std::vector<Pt> sorted = pts;
  sorted.push_back(Pt{0.0, 0.0});
  std::sort(sorted.begin(), sorted.end(), [](Pt a, Pt b) { return a.x != b.x ? a.x < b.x : a.y > b.y; });
  std::vector<Pt> h;
  for (const Pt& p : sorted) {
    while (h.size() >= 2) {
      const Pt o = h[h.size() - 2];
      const Pt a = h.back();
      if ((a.x - o.x) * (p.y - o.y) - (a.y - o.y) * (p.x - o.x) >= 0.0) {
        h.pop_back();
      } else {
        break;
      }
    }
    h.push_back(p);
  }
  double worst = 0.0;
  for (const Pt& p : pts) {
    double d = HUGE_VAL;
    for (std::size_t j = 0; j + 1 < h.size(); ++j) d = std::min(d, seg_dist(p, h[j], h[j + 1]));
    if (h.size() == 1) d = std::hypot(p.x - h[0].x, p.y - h[0].y);
    worst = std::max(worst, d);
  }
  return worst;
}

ProfileResult limit_shape_profile(const ExperimentConfig& c, std::size_t angles) {
  c.validate();
  if (angles < 2) throw Error(ErrorCode::InvalidParams, "profile needs at least two angles");
  ProfileResult out;
  for (std::size_t i = 0; i < angles; ++i) {
    out.angles.push_back(std::numbers::pi / 2.0 * static_cast<double>(i) / static_cast<double>(angles - 1));
  }
  ExperimentConfig one = c;
  one.n_grid = {c.n_grid.front()};
  const auto tasks = experiment_tasks(one);
  std::vector<std::vector<double>> chain_profiles(tasks.size(), std::vector<double>(angles, 0.0));
  parallel_for_replicas(tasks.size(), worker_count(), [&](std::size_t i) {
    const auto& t = tasks[i];
    const ModelParams params(t.lambda, t.n);
    ChainState state = init_chain(params, RngStream(t.seed, chain_stream(t.n, t.chain)));
    RunOptions o = t.moves;
    o.sweeps = t.burn_in;
    run(state, o);
    o.sweeps = t.thin;
    auto& prof = chain_profiles[i];
    for (std::uint64_t s = 0; s < t.samples; ++s) {
      run(state, o);
      for (std::size_t a = 0; a < angles; ++a) prof[a] += radial_position(state.path(), out.angles[a], t.n);
    }
    for (double& v : prof) v /= static_cast<double>(std::max<std::uint64_t>(1, t.samples));
  });
  for (std::size_t a = 0; a < angles; ++a) {
    std::vector<double> v;
    for (const auto& p : chain_profiles) v.push_back(p[a]);
    out.mean.push_back(mean(v));
    out.se.push_back(v.size() > 1 ? std::sqrt(variance(v) / static_cast<double>(v.size())) : 0.0);
  }
  out.concavity_defect = concavity_defect(out.angles, out.mean);
  return out;
}

double profile_deviation(const ProfileResult& a, const ProfileResult& b) {
  if (a.mean.size() != b.mean.size()) throw Error(ErrorCode::InvalidParams, "profiles on different grids");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.mean.size(); ++i) {
    const double pooled = std::hypot(a.se[i], b.se[i]);
    const double d = std::abs(a.mean[i] - b.mean[i]);
    worst = std::max(worst, pooled > 0.0 ? d / pooled : (d > 0.0 ? HUGE_VAL : 0.0));
  }
  return worst;
}

}  // namespace facetlab
