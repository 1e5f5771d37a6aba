#include "facetlab/ensemble.hpp"

#include <cstdlib>
#include <exception>
#include <string>

#include <omp.h>

#include "facetlab/errors.hpp"

namespace facetlab {

std::uint64_t chain_stream(std::int64_t n, std::uint64_t chain) {
  return mix64(static_cast<std::uint64_t>(n) * 0x9E3779B97F4A7C15ULL + chain);
}

ChainOutput run_chain(const ChainTask& task) {
  const ModelParams params(task.lambda, task.n);
  ChainState state = init_chain(params, RngStream(task.seed, chain_stream(task.n, task.chain)));
  RunOptions o = task.moves;
  o.thin = 0;
  o.sweeps = task.burn_in;
  run(state, o);
  ChainOutput out;
  out.records.reserve(task.samples);
  o.sweeps = std::max<std::uint64_t>(1, task.thin);
  for (std::uint64_t s = 0; s < task.samples; ++s) {
    run(state, o);
    out.records.push_back(make_record(state.path(), params, task.seed, task.chain, state.sweep_count()));
  }
  out.counters = state.counters();
  return out;
}

int worker_count() {
  if (const char* env = std::getenv("FACETLAB_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w > 0) return w;
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, std::string("FACETLAB_WORKERS is not an integer: ") + env);
    }
  }
  return omp_get_max_threads();
}

void parallel_for_replicas(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  std::exception_ptr failure;
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<ChainOutput> run_chains_serial(const std::vector<ChainTask>& tasks) {
  std::vector<ChainOutput> out;
  out.reserve(tasks.size());
  for (const auto& t : tasks) out.push_back(run_chain(t));
  return out;
}

std::vector<ChainOutput> run_chains_parallel(const std::vector<ChainTask>& tasks, int workers) {
  std::vector<ChainOutput> out(tasks.size());
  parallel_for_replicas(tasks.size(), workers, [&](std::size_t i) { out[i] = run_chain(tasks[i]); });
  return out;
}

std::vector<ChainOutput> run_chains(const std::vector<ChainTask>& tasks) {
  const int w = worker_count();
  return w <= 1 ? run_chains_serial(tasks) : run_chains_parallel(tasks, w);
}

}  // namespace facetlab
