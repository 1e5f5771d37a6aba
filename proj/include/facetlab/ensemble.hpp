#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "facetlab/chain.hpp"
#include "facetlab/records.hpp"

namespace facetlab {

struct ChainTask {
  double lambda = 0.3;
  std::int64_t n = 1;
  std::uint64_t seed = 0;
  std::uint64_t chain = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t samples = 0;
  /// Sweeps between recorded samples.
  std::uint64_t thin = 1;
  RunOptions moves;
};

struct ChainOutput {
  std::vector<ChainRecord> records;
  std::array<MoveCounter, kMoveKinds> counters{};
};

/// Stream id of a chain; a pure function of (N, chain index).
std::uint64_t chain_stream(std::int64_t n, std::uint64_t chain);

/// Runs one chain from the square start.
ChainOutput run_chain(const ChainTask& task);

/// Worker count: FACETLAB_WORKERS when set and positive, else the OpenMP default.
int worker_count();

/// Runs independent tasks; outputs are indexed like the tasks and do not
/// depend on the worker count.
std::vector<ChainOutput> run_chains_serial(const std::vector<ChainTask>& tasks);
std::vector<ChainOutput> run_chains_parallel(const std::vector<ChainTask>& tasks, int workers);
std::vector<ChainOutput> run_chains(const std::vector<ChainTask>& tasks);

/// Generic replica map: out[i] = fn(i), evaluated across workers.
void parallel_for_replicas(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace facetlab
