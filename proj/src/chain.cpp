#include "facetlab/chain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "facetlab/errors.hpp"
#include "facetlab/samplers.hpp"
#include "facetlab/stats.hpp"
#include "json.hpp"

namespace facetlab {

const char* to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::Interior: return "interior";
    case MoveKind::Boundary: return "boundary";
    case MoveKind::Indel: return "indel";
    case MoveKind::Gibbs: return "gibbs";
  }
  return "unknown";
}

const char* to_string(GibbsTier tier) {
  switch (tier) {
    case GibbsTier::Unconstrained: return "unconstrained";
    case GibbsTier::Exact: return "exact";
    case GibbsTier::Rejection: return "rejection";
    case GibbsTier::FlipChain: return "flip-chain";
    case GibbsTier::Kept: return "kept";
  }
  return "unknown";
}

ChainState::ChainState(ModelParams params, LatticePath path, RngStream rng)
    : params_(params), path_(std::move(path)), rng_(rng) {}

void ChainState::record(MoveKind kind, bool accepted) {
  auto& c = counters_[static_cast<std::size_t>(kind)];
  ++c.proposed;
  if (!accepted) return;
  ++c.accepted;
  if (++accepted_since_audit_ >= kAuditEvery) audit();
}

void ChainState::audit() {
  accepted_since_audit_ = 0;
  ++audits_;
  const std::int64_t fresh = path_.recompute_area();
  if (fresh != path_.area()) {
    throw Error(ErrorCode::AuditFailure, "cached area " + std::to_string(path_.area()) +
                                             " differs from recomputed " + std::to_string(fresh));
  }
  if (fresh < floor()) throw Error(ErrorCode::AuditFailure, "chain left the conditioned space");
}

void ChainState::restore_counters(std::uint64_t sweeps,
                                  const std::array<MoveCounter, kMoveKinds>& c) {
  sweeps_ = sweeps;
  counters_ = c;
}

ChainState init_chain(const ModelParams& params, RngStream rng) {
  return ChainState(params, LatticePath::square(params.n_target()), rng);
}

namespace {

bool grows_past_cap(const ChainState& s) {
  return s.max_length() != 0 && s.path().length() + 1 > s.max_length();
}

}  // namespace

bool step_interior(ChainState& state) {
  LatticePath& p = state.mutable_path();
  const std::size_t n = p.length();
  bool ok = false;
  if (n >= 2) {
    const std::size_t v = 1 + state.rng().uniform_below(n - 1);
    const int delta = p.corner_delta(v);
    if (delta > 0 || (delta < 0 && p.area() - 1 >= state.floor())) {
      p.flip_corner_in_place(v);
      ok = true;
    }
  }
  state.record(MoveKind::Interior, ok);
  return ok;
}

bool step_boundary(ChainState& state) {
  LatticePath& p = state.mutable_path();
  RngStream& rng = state.rng();
  const std::size_t n = p.length();
  const double lam = state.params().lambda();
  bool ok = false;
  switch (rng.uniform_below(4)) {
    case 0:
      if (!grows_past_cap(state) && rng.bernoulli(lam)) {
        p.insert_step(0, Step::Down);
        ok = true;
      }
      break;
    case 1:
      if (n > 0 && p.steps().is_down(0)) {
        p.erase_step(0);
        ok = true;
      }
      break;
    case 2:
      if (!grows_past_cap(state) && rng.bernoulli(lam)) {
        p.insert_step(n, Step::Right);
        ok = true;
      }
      break;
    default:
      if (n > 0 && !p.steps().is_down(n - 1)) {
        p.erase_step(n - 1);
        ok = true;
      }
      break;
  }
  state.record(MoveKind::Boundary, ok);
  return ok;
}

bool step_indel(ChainState& state) {
  LatticePath& p = state.mutable_path();
  RngStream& rng = state.rng();
  const std::size_t n = p.length();
  bool ok = false;
  if (rng.coin()) {
    const std::size_t slot = rng.uniform_below(n + 1);
    const Step letter = rng.coin() ? Step::Down : Step::Right;
    if (!grows_past_cap(state) && rng.bernoulli(2.0 * state.params().lambda())) {
      p.insert_step(slot, letter);
      ok = true;
    }
  } else if (n > 0) {
    const std::size_t pos = rng.uniform_below(n);
    if (p.area() + p.erasure_loss(pos) >= state.floor()) {
      p.erase_step(pos);
      ok = true;
    }
  }
  state.record(MoveKind::Indel, ok);
  return ok;
}

bool step_mixed(ChainState& state, const MoveMix& mix) {
  const double u = state.rng().uniform();
  if (u < mix.interior) return step_interior(state);
  if (u < mix.interior + mix.boundary) return step_boundary(state);
  return step_indel(state);
}

// ------------------------------------------------------------- Gibbs resampling

namespace {

double binomial_capped(std::size_t n, std::size_t k, double cap) {
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    if (c > cap) return c;
  }
  return std::round(c);
}

// Tail counts C[r][d][t] = #arrangements of r R's and d D's with >= t inversions.
class TailCounts {
 public:
  TailCounts(std::size_t r, std::size_t d, std::size_t t)
      : r_(r), d_(d), t_(t), c_((r + 1) * (d + 1) * (t + 1), 0.0) {
    for (std::size_t i = 0; i <= r; ++i) {
      for (std::size_t j = 0; j <= d; ++j) {
        for (std::size_t k = 0; k <= t; ++k) {
          double v;
          if (i == 0 || j == 0) {
            v = k == 0 ? 1.0 : 0.0;
          } else {
            v = at(i - 1, j, k > j ? k - j : 0) + at(i, j - 1, k);
          }
          c_[idx(i, j, k)] = v;
        }
      }
    }
  }

  double at(std::size_t i, std::size_t j, std::size_t k) const { return c_[idx(i, j, k)]; }

  StepSequence sample(RngStream& rng) const {
    StepSequence s;
    std::size_t i = r_;
    std::size_t j = d_;
    std::size_t k = t_;
    while (i + j > 0) {
      bool right;
      if (i == 0) {
        right = false;
      } else if (j == 0) {
        right = true;
      } else {
        const double pr = at(i - 1, j, k > j ? k - j : 0);
        right = rng.uniform() * at(i, j, k) < pr;
      }
      if (right) {
        s.push_back(Step::Right);
        k = k > j ? k - j : 0;
        --i;
      } else {
        s.push_back(Step::Down);
        --j;
      }
    }
    return s;
  }

 private:
  std::size_t idx(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * (d_ + 1) + j) * (t_ + 1) + k;
  }
  std::size_t r_, d_, t_;
  std::vector<double> c_;
};

// Uniform arrangement, returning its inversion count.
std::int64_t uniform_arrangement(std::size_t r, std::size_t d, RngStream& rng, StepSequence& out) {
  out = StepSequence();
  std::int64_t inv = 0;
  std::uint64_t rr = r;
  std::uint64_t dd = d;
  while (rr + dd > 0) {
    if (rng.uniform_below(rr + dd) < rr) {
      out.push_back(Step::Right);
      inv += static_cast<std::int64_t>(dd);
      --rr;
    } else {
      out.push_back(Step::Down);
      --dd;
    }
  }
  return inv;
}

}  // namespace

StepSequence sample_arrangement_min_inversions(std::size_t rights, std::size_t downs,
                                               std::int64_t need, RngStream& rng) {
  const auto t = static_cast<std::size_t>(std::max<std::int64_t>(0, need));
  if (t > rights * downs) throw Error(ErrorCode::EmptyBridgeSpace, "no arrangement reaches the floor");
  return TailCounts(rights, downs, t).sample(rng);
}

double count_arrangements_min_inversions(std::size_t rights, std::size_t downs, std::int64_t need) {
  const auto t = static_cast<std::size_t>(std::max<std::int64_t>(0, need));
  if (t > rights * downs) return 0.0;
  return TailCounts(rights, downs, t).at(rights, downs, t);
}

GibbsResult resample_gibbs(ChainState& state, std::size_t ia, std::size_t ib,
                           const GibbsOptions& opts) {
  LatticePath& p = state.mutable_path();
  if (ia > ib || ib > p.length()) {
    throw Error(ErrorCode::BridgeEndpointsInvalid, "bridge indices out of order or range");
  }
  GibbsResult res;
  const StepSequence old = p.steps().slice(ia, ib);
  const std::size_t d = old.count_down();
  const std::size_t r = old.size() - d;
  const std::int64_t old_inv = old.inversions();
  const std::int64_t need = state.floor() - (p.area() - old_inv);
  RngStream& rng = state.rng();

  StepSequence fresh;
  if (r == 0 || d == 0) {
    res.tier = GibbsTier::Unconstrained;
    state.record(MoveKind::Gibbs, false);
    return res;
  }
  if (need <= 0) {
    res.tier = GibbsTier::Unconstrained;
    uniform_arrangement(r, d, rng, fresh);
  } else {
    const double binom = binomial_capped(r + d, r, static_cast<double>(opts.exact_binomial));
    const double table = static_cast<double>(r + 1) * static_cast<double>(d + 1) *
                         static_cast<double>(need + 1);
    if (binom <= static_cast<double>(opts.exact_binomial) &&
        table <= static_cast<double>(opts.exact_table)) {
      res.tier = GibbsTier::Exact;
      fresh = TailCounts(r, d, static_cast<std::size_t>(need)).sample(rng);
    } else {
      res.tier = GibbsTier::Kept;
      StepSequence trial;
      for (std::size_t k = 0; k < opts.attempts; ++k) {
        if (uniform_arrangement(r, d, rng, trial) >= need) {
          res.tier = GibbsTier::Rejection;
          fresh = std::move(trial);
          break;
        }
      }
      if (res.tier == GibbsTier::Kept && opts.flip_sweeps > 0 && ib - ia >= 2) {
        res.tier = GibbsTier::FlipChain;
        res.approximate = true;
        const std::size_t span = ib - ia;
        const std::uint64_t proposals = opts.flip_sweeps * span;
        bool moved = false;
        for (std::uint64_t k = 0; k < proposals; ++k) {
          const std::size_t v = ia + 1 + rng.uniform_below(span - 1);
          const int delta = p.corner_delta(v);
          if (delta > 0 || (delta < 0 && p.area() - 1 >= state.floor())) {
            p.flip_corner_in_place(v);
            moved = true;
          }
        }
        res.changed = moved && !(p.steps().slice(ia, ib) == old);
        state.record(MoveKind::Gibbs, res.changed);
        return res;
      }
      if (res.tier == GibbsTier::Kept) {
        state.record(MoveKind::Gibbs, false);
        return res;
      }
    }
  }
  res.changed = !(fresh == old);
  p.replace_segment(ia, fresh);
  state.record(MoveKind::Gibbs, res.changed);
  return res;
}

GibbsResult resample_gibbs(ChainState& state, Point a, Point b, const GibbsOptions& opts) {
  const auto ia = state.path().index_of(a);
  const auto ib = state.path().index_of(b);
  if (!ia || !ib) throw Error(ErrorCode::BridgeEndpointsInvalid, "bridge endpoint is not a path vertex");
  return resample_gibbs(state, *ia, *ib, opts);
}

std::optional<std::pair<std::size_t, std::size_t>> cone_window(const LatticePath& path, double lo,
                                                               double hi) {
  const auto v = path.vertices();
  std::optional<std::size_t> first;
  std::size_t last = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double ang = std::atan2(static_cast<double>(v[i].y), static_cast<double>(v[i].x));
    if (ang > hi) continue;
    if (ang < lo) break;
    if (!first) first = i;
    last = i;
  }
  if (!first) return std::nullopt;
  return std::make_pair(*first, last);
}

GibbsResult gibbs_window_move(ChainState& state, double width, const GibbsOptions& opts) {
  constexpr double kQuarter = std::numbers::pi / 2.0;
  const double centre = -width / 2.0 + state.rng().uniform() * (kQuarter + width);
  const double lo = std::max(0.0, centre - width / 2.0);
  const double hi = std::min(kQuarter, centre + width / 2.0);
  const auto w = cone_window(state.path(), lo, hi);
  if (!w || w->second - w->first < 2) {
    state.record(MoveKind::Gibbs, false);
    return GibbsResult{};
  }
  return resample_gibbs(state, w->first, w->second, opts);
}

// ------------------------------------------------------------------------ run

RunResult run(ChainState& state, const RunOptions& opts) {
  RunResult out;
  const double f = std::clamp(opts.interior_fraction, 0.0, 1.0);
  const MoveMix mix{f, (1.0 - f) * (1.0 - opts.indel_fraction), (1.0 - f) * opts.indel_fraction};
  const double width =
      opts.window_c * std::pow(static_cast<double>(state.params().n_target()), -1.0 / 3.0);
  const auto whole = static_cast<std::uint64_t>(std::floor(opts.gibbs_per_sweep));
  const double frac = opts.gibbs_per_sweep - static_cast<double>(whole);
  const std::uint64_t n = proposals_per_sweep(state.params());
  for (std::uint64_t s = 0; s < opts.sweeps; ++s) {
    for (std::uint64_t i = 0; i < n; ++i) step_mixed(state, mix);
    std::uint64_t g = whole;
    if (frac > 0.0 && state.rng().bernoulli(frac)) ++g;
    for (std::uint64_t k = 0; k < g; ++k) gibbs_window_move(state, width, opts.gibbs);
    state.add_sweep();
    if (opts.thin != 0 && state.sweep_count() % opts.thin == 0) {
      const LatticePath& p = state.path();
      out.trace.push_back(TraceRecord{state.sweep_count(), static_cast<std::int64_t>(p.length()),
                                      excess_area(p, state.params()), roughness_stats(p)});
    }
  }
  if (out.trace.size() >= 16) {
    std::vector<double> x;
    x.reserve(out.trace.size());
    for (const auto& t : out.trace) x.push_back(t.stats.mean_fl);
    out.tau_mean_fl = integrated_autocorr_time(x);
  }
  return out;
}

RunResult run(ChainState& state, std::uint64_t sweeps, double interior_fraction) {
  RunOptions o;
  o.sweeps = sweeps;
  o.interior_fraction = interior_fraction;
  return run(state, o);
}

// ------------------------------------------------------------ explicit kernel

namespace {

std::uint64_t path_key(const LatticePath& p) {
  std::uint64_t pattern = 0;
  const auto& s = p.steps();
  for (std::size_t i = 0; i < s.size(); ++i) pattern = (pattern << 1) | (s.is_down(i) ? 1U : 0U);
  return (static_cast<std::uint64_t>(s.size()) << 32) | pattern;
}

}  // namespace

std::optional<std::size_t> TransitionKernel::index_of(const LatticePath& p) const {
  // States are sorted by (length, pattern), which is the key order.
  const std::uint64_t key = path_key(p);
  auto it = std::lower_bound(states.begin(), states.end(), key,
                             [](const LatticePath& q, std::uint64_t k) { return path_key(q) < k; });
  if (it == states.end() || path_key(*it) != key) return std::nullopt;
  return static_cast<std::size_t>(it - states.begin());
}

TransitionKernel transition_kernel(const ModelParams& params, std::size_t max_len,
                                   const MoveMix& mix) {
  TransitionKernel k;
  const std::int64_t floor = params.area_threshold();
  const double lam = params.lambda();
  std::unordered_map<std::uint64_t, std::size_t> index;
  for (const LatticePath& p : enumerate_paths(max_len)) {
    if (p.area() < floor) continue;
    index.emplace(path_key(p), k.states.size());
    k.weights.push_back(std::pow(lam, static_cast<double>(p.length())));
    k.states.push_back(p);
  }
  k.rows.resize(k.states.size());
  for (std::size_t x = 0; x < k.states.size(); ++x) {
    const LatticePath& p = k.states[x];
    const std::size_t n = p.length();
    std::unordered_map<std::size_t, double> row;
    auto go = [&](const LatticePath& q, double pr) { row[index.at(path_key(q))] += pr; };
    auto stay = [&](double pr) { row[x] += pr; };
    const bool can_grow = n + 1 <= max_len;

    if (n < 2) {
      stay(mix.interior);
    } else {
      const double q = mix.interior / static_cast<double>(n - 1);
      for (std::size_t v = 1; v < n; ++v) {
        const int delta = p.corner_delta(v);
        if (delta > 0 || (delta < 0 && p.area() - 1 >= floor)) {
          LatticePath t = p;
          t.flip_corner_in_place(v);
          go(t, q);
        } else {
          stay(q);
        }
      }
    }

    const double qb = mix.boundary / 4.0;
    for (int m = 0; m < 4; ++m) {
      const bool grow = (m == 0 || m == 2);
      if (grow) {
        if (!can_grow) {
          stay(qb);
          continue;
        }
        LatticePath t = p;
        if (m == 0) {
          t.insert_step(0, Step::Down);
        } else {
          t.insert_step(n, Step::Right);
        }
        go(t, qb * lam);
        stay(qb * (1.0 - lam));
      } else {
        const bool defined =
            n > 0 && (m == 1 ? p.steps().is_down(0) : !p.steps().is_down(n - 1));
        if (!defined) {
          stay(qb);
          continue;
        }
        LatticePath t = p;
        t.erase_step(m == 1 ? 0 : n - 1);
        go(t, qb);
      }
    }

    if (mix.indel > 0.0) {
      const double qi = mix.indel / 2.0 / static_cast<double>(n + 1) / 2.0;
      for (std::size_t slot = 0; slot <= n; ++slot) {
        for (Step s : {Step::Right, Step::Down}) {
          if (!can_grow) {
            stay(qi);
            continue;
          }
          LatticePath t = p;
          t.insert_step(slot, s);
          go(t, qi * 2.0 * lam);
          stay(qi * (1.0 - 2.0 * lam));
        }
      }
      if (n == 0) {
        stay(mix.indel / 2.0);
      } else {
        const double qd = mix.indel / 2.0 / static_cast<double>(n);
        for (std::size_t pos = 0; pos < n; ++pos) {
          if (p.area() + p.erasure_loss(pos) < floor) {
            stay(qd);
            continue;
          }
          LatticePath t = p;
          t.erase_step(pos);
          go(t, qd);
        }
      }
    }
    auto& out = k.rows[x];
    out.assign(row.begin(), row.end());
    std::sort(out.begin(), out.end());
  }
  return k;
}

// ---------------------------------------------------------------- checkpoints

std::string checkpoint_string(const ChainState& state) {
  nlohmann::json j;
  j["format"] = "facetlab-checkpoint";
  j["version"] = 1;
  j["lambda"] = state.params().lambda();
  j["n"] = state.params().n_target();
  j["rng"] = {{"seed", state.rng().seed()},
              {"stream", state.rng().stream_id()},
              {"counter", state.rng().counter()}};
  j["path"] = state.path().encode();
  j["sweeps"] = state.sweep_count();
  j["max_length"] = state.max_length();
  nlohmann::json c = nlohmann::json::object();
  for (std::size_t i = 0; i < kMoveKinds; ++i) {
    const auto& m = state.counters()[i];
    c[to_string(static_cast<MoveKind>(i))] = {m.proposed, m.accepted};
  }
  j["counters"] = c;
  return j.dump();
}

ChainState parse_checkpoint(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format") != "facetlab-checkpoint" || j.at("version") != 1) {
      throw Error(ErrorCode::ConfigError, "unsupported checkpoint format");
    }
    ModelParams params(j.at("lambda").get<double>(), j.at("n").get<std::int64_t>());
    const auto& r = j.at("rng");
    RngStream rng(r.at("seed").get<std::uint64_t>(), r.at("stream").get<std::uint64_t>(),
                  r.at("counter").get<std::uint64_t>());
    ChainState s(params, LatticePath::parse(j.at("path").get<std::string>()), rng);
    s.set_max_length(j.at("max_length").get<std::size_t>());
    std::array<MoveCounter, kMoveKinds> c{};
    for (std::size_t i = 0; i < kMoveKinds; ++i) {
      const auto& m = j.at("counters").at(to_string(static_cast<MoveKind>(i)));
      c[i] = MoveCounter{m.at(0).get<std::uint64_t>(), m.at(1).get<std::uint64_t>()};
    }
    s.restore_counters(j.at("sweeps").get<std::uint64_t>(), c);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::string& file, const ChainState& state) {
  const std::string tmp = file + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp);
    out << checkpoint_string(state) << '\n';
  }
  if (std::rename(tmp.c_str(), file.c_str()) != 0) {
    throw Error(ErrorCode::IoError, "cannot rename checkpoint to " + file);
  }
}

ChainState load_checkpoint(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(ss.str());
}

}  // namespace facetlab
