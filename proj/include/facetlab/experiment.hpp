#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "facetlab/ensemble.hpp"
#include "facetlab/records.hpp"
#include "facetlab/stats.hpp"

namespace facetlab {

struct ExperimentConfig {
  static constexpr int kVersion = 1;

  double lambda = 0.3;
  std::vector<std::int64_t> n_grid{32, 64, 128, 256, 512};
  std::uint64_t chains = 16;
  /// Post burn-in sweeps per chain at the smallest N.
  std::uint64_t sweeps = 1000;
  std::uint64_t burn_in = 200;
  std::uint64_t thin = 10;
  /// Sweep counts grow like (N / N_min)^sweep_exponent.
  double sweep_exponent = 0.0;
  std::uint64_t seed = 1;
  double chi = 0.5;
  double eta = 0.05;
  double epsilon = 0.1;
  double epsilon1 = 2.0 / 27.0;
  double k1 = 3.0;
  double k2 = 0.15;
  double interior_fraction = 0.5;
  double indel_fraction = 0.5;
  double gibbs_per_sweep = 0.0;
  double window_c = 1.5;
  std::string output_dir;
  std::vector<std::string> statistics{"mean_fl", "mean_lr", "max_fl", "max_lr"};

  void validate() const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

std::string config_to_string(const ExperimentConfig& c);
/// Parses `key = value` lines; unknown keys and bad values are ConfigError.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& file);
void save_config(const std::string& file, const ExperimentConfig& c);

/// Tasks of the experiment in (N, chain) order.
std::vector<ChainTask> experiment_tasks(const ExperimentConfig& c);

struct StatisticRow {
  std::int64_t n = 0;
  double mean = 0.0;
  /// Standard error from the spread of per-chain means.
  double se = 0.0;
  double median = 0.0;
  std::size_t samples = 0;
};

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double r2 = 0.0;
};

struct ScalingResult {
  std::map<std::string, std::vector<StatisticRow>> rows;
  /// Log-log fits; present for statistics with at least four grid points.
  std::map<std::string, ExponentFit> fits;
  /// Records per N, chain-major.
  std::map<std::int64_t, std::vector<std::vector<ChainRecord>>> records;
};

ScalingResult estimate(const ExperimentConfig& c);
/// Aggregates chain outputs laid out as experiment_tasks(c).
ScalingResult summarise(const ExperimentConfig& c, const std::vector<ChainOutput>& outputs);
/// Writes raw/N<N>_chain<c>.jsonl and summary.json under the output directory.
void write_outputs(const ExperimentConfig& c, const ScalingResult& r);
std::string summary_json(const ExperimentConfig& c, const ScalingResult& r);

struct FitRow {
  double n = 0.0;
  double mean = 0.0;
  double se = 0.0;
};

/// Weighted least squares of log mean on log N with a parametric bootstrap CI.
ExponentFit fit_exponent(const std::vector<FitRow>& rows, std::size_t bootstrap = 2000,
                         std::uint64_t seed = 1);
/// Same fit with a CI from resampling chains within each N.
ExponentFit fit_exponent_chains(const std::vector<std::int64_t>& n,
                                const std::vector<std::vector<double>>& chain_means,
                                std::size_t bootstrap = 2000, std::uint64_t seed = 1);

struct TailRow {
  double t = 0.0;
  double survival = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t total = 0;
};

/// Survival of statistic / N^p at each threshold, p the statistic's scale.
std::vector<TailRow> tail_curve(const std::vector<ChainRecord>& records, std::string_view statistic,
                                const std::vector<double>& thresholds);
/// Runs the chains of the first grid point and tabulates the tail.
std::vector<TailRow> tail_curve(const ExperimentConfig& c, std::string_view statistic,
                                const std::vector<double>& thresholds);

/// Radial position of the path at argument theta, divided by N.
double radial_position(const LatticePath& path, double theta, std::int64_t n);

struct ProfileResult {
  std::vector<double> angles;
  std::vector<double> mean;
  std::vector<double> se;
  /// Largest distance from a mean profile point to the concave hull of the profile.
  double concavity_defect = 0.0;
};
ProfileResult limit_shape_profile(const ExperimentConfig& c, std::size_t angles = 33);
/// max |a - b| / sqrt(se_a^2 + se_b^2) over the angle grid.
double profile_deviation(const ProfileResult& a, const ProfileResult& b);
double concavity_defect(const std::vector<double>& angles, const std::vector<double>& radii);

}  // namespace facetlab
