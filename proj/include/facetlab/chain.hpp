#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "facetlab/majorant.hpp"
#include "facetlab/path.hpp"
#include "facetlab/rng.hpp"

namespace facetlab {

enum class MoveKind : int { Interior = 0, Boundary = 1, Indel = 2, Gibbs = 3 };
inline constexpr std::size_t kMoveKinds = 4;
const char* to_string(MoveKind kind);

struct MoveCounter {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  friend bool operator==(const MoveCounter&, const MoveCounter&) = default;
};

/// Markov chain on the conditioned path space. Owns one mutable path buffer.
class ChainState {
 public:
  static constexpr std::uint64_t kAuditEvery = 10000;

  ChainState(ModelParams params, LatticePath path, RngStream rng);

  const ModelParams& params() const { return params_; }
  const LatticePath& path() const { return path_; }
  LatticePath& mutable_path() { return path_; }
  RngStream& rng() { return rng_; }
  const RngStream& rng() const { return rng_; }

  std::int64_t area() const { return path_.area(); }
  std::int64_t floor() const { return params_.area_threshold(); }

  /// Proposals that would exceed this length are rejected; 0 disables the cap.
  std::size_t max_length() const { return max_length_; }
  void set_max_length(std::size_t cap) { max_length_ = cap; }

  std::uint64_t sweep_count() const { return sweeps_; }
  void add_sweep() { ++sweeps_; }
  const std::array<MoveCounter, kMoveKinds>& counters() const { return counters_; }
  std::uint64_t audits() const { return audits_; }

  /// Records a proposal and runs the area audit on schedule.
  void record(MoveKind kind, bool accepted);
  /// Compares the cached area with a from-scratch recomputation.
  void audit();

  // Checkpoint restoration.
  void restore_counters(std::uint64_t sweeps, const std::array<MoveCounter, kMoveKinds>& c);

 private:
  ModelParams params_;
  LatticePath path_;
  RngStream rng_;
  std::size_t max_length_ = 0;
  std::uint64_t sweeps_ = 0;
  std::array<MoveCounter, kMoveKinds> counters_{};
  std::uint64_t accepted_since_audit_ = 0;
  std::uint64_t audits_ = 0;
};

/// Square of side N: area exactly N^2.
ChainState init_chain(const ModelParams& params, RngStream rng);

bool step_interior(ChainState& state);
bool step_boundary(ChainState& state);
/// Insert a uniform letter at a uniform slot, or delete a uniform step.
bool step_indel(ChainState& state);

/// Per-proposal move probabilities of the local chain.
struct MoveMix {
  double interior = 0.5;
  double boundary = 0.5;
  double indel = 0.0;
};
bool step_mixed(ChainState& state, const MoveMix& mix);

enum class GibbsTier { Unconstrained, Exact, Rejection, FlipChain, Kept };
const char* to_string(GibbsTier tier);

struct GibbsOptions {
  std::size_t attempts = 64;
  /// Sweeps of the inner constrained flip chain once rejection fails.
  std::size_t flip_sweeps = 0;
  std::uint64_t exact_binomial = 1'000'000;
  std::uint64_t exact_table = 4'000'000;
};

struct GibbsResult {
  GibbsTier tier = GibbsTier::Kept;
  bool changed = false;
  /// True when the draw came from the inner flip chain.
  bool approximate = false;
};

/// Replaces the bridge between vertex indices ia <= ib by a uniform bridge
/// subject to the area constraint. The caller must choose (ia, ib) from the
/// path outside the bridge.
GibbsResult resample_gibbs(ChainState& state, std::size_t ia, std::size_t ib,
                           const GibbsOptions& opts = {});
GibbsResult resample_gibbs(ChainState& state, Point a, Point b, const GibbsOptions& opts = {});

/// Uniform arrangement of `rights` R and `downs` D steps with at least
/// `need` inversions, drawn through the tail-count recursion.
StepSequence sample_arrangement_min_inversions(std::size_t rights, std::size_t downs,
                                               std::int64_t need, RngStream& rng);
/// Number of such arrangements, as a double.
double count_arrangements_min_inversions(std::size_t rights, std::size_t downs,
                                         std::int64_t need);

/// First and last vertex index with argument in [lo, hi].
std::optional<std::pair<std::size_t, std::size_t>> cone_window(const LatticePath& path, double lo,
                                                               double hi);

/// Gibbs move on the window cut out by a uniformly placed cone of width
/// `width` radians.
GibbsResult gibbs_window_move(ChainState& state, double width, const GibbsOptions& opts = {});

/// Proposals per sweep: 2N, the length of the initial square.
inline std::uint64_t proposals_per_sweep(const ModelParams& params) {
  return static_cast<std::uint64_t>(std::max<std::int64_t>(1, 2 * params.n_target()));
}

struct RunOptions {
  std::uint64_t sweeps = 0;
  double interior_fraction = 1.0;
  /// Share of non-interior proposals that are insert/delete moves.
  double indel_fraction = 0.0;
  /// Window moves per sweep (fractional part drawn as a Bernoulli).
  double gibbs_per_sweep = 0.0;
  /// Window width is window_c * N^{-1/3}.
  double window_c = 1.5;
  GibbsOptions gibbs;
  /// Trace every `thin` sweeps; 0 disables the trace.
  std::uint64_t thin = 0;
};

struct TraceRecord {
  std::uint64_t sweep = 0;
  std::int64_t length = 0;
  std::int64_t excess = 0;
  RoughnessStats stats;
};

struct RunResult {
  std::vector<TraceRecord> trace;
  /// Integrated autocorrelation time of MeanFL in trace units (batch means);
  /// 0 when the trace is too short.
  double tau_mean_fl = 0.0;
};

RunResult run(ChainState& state, const RunOptions& opts);
RunResult run(ChainState& state, std::uint64_t sweeps, double interior_fraction);

/// Explicit one-proposal kernel of step_mixed on {length <= max_len, A >= N^2}.
struct TransitionKernel {
  std::vector<LatticePath> states;
  /// Unnormalised target weights lambda^|g|.
  std::vector<double> weights;
  /// Sparse rows: (target index, probability), targets distinct.
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;

  std::optional<std::size_t> index_of(const LatticePath& p) const;
};
TransitionKernel transition_kernel(const ModelParams& params, std::size_t max_len,
                                   const MoveMix& mix);

std::string checkpoint_string(const ChainState& state);
ChainState parse_checkpoint(std::string_view text);
void save_checkpoint(const std::string& file, const ChainState& state);
ChainState load_checkpoint(const std::string& file);

}  // namespace facetlab
