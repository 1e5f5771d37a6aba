#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "facetlab/chain.hpp"
#include "facetlab/errors.hpp"
#include "facetlab/experiment.hpp"
#include "facetlab/oracle.hpp"
#include "facetlab/records.hpp"
#include "facetlab/samplers.hpp"
#include "facetlab/sectors.hpp"
#include "json.hpp"

using namespace facetlab;

namespace {

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidParams:
    case ErrorCode::InvalidPath:
    case ErrorCode::UnknownStatistic:
    case ErrorCode::InsufficientData:
    case ErrorCode::NonPositiveMean:
      return 2;
    case ErrorCode::BudgetExceeded:
    case ErrorCode::AcceptanceBudgetExceeded:
      return 3;
    case ErrorCode::AuditFailure:
      return 4;
    default:
      return 1;
  }
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_file_atomic(out, text);
  }
}

std::vector<LatticePath> read_paths(const std::string& file) {
  std::istringstream in(read_file(file));
  std::vector<LatticePath> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '{') {
      const auto j = nlohmann::json::parse(line);
      out.push_back(LatticePath::parse(j.at("path").get<std::string>()));
    } else {
      out.push_back(LatticePath::parse(line));
    }
  }
  return out;
}

std::vector<FitRow> read_fit_table(const std::string& file) {
  std::istringstream in(read_file(file));
  std::vector<FitRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
    for (char& ch : line) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream ls(line);
    FitRow r;
    if (!(ls >> r.n >> r.mean)) throw Error(ErrorCode::ConfigError, "bad table line: " + line);
    if (!(ls >> r.se)) r.se = 0.0;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"facetlab: area-conditioned oriented random walks"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out;

  auto* sample = app.add_subcommand("sample", "draw paths from the free or conditioned measure");
  double s_lambda = 0.3;
  std::int64_t s_n = 1;
  std::uint64_t s_count = 10;
  bool s_conditioned = false;
  std::uint64_t s_budget = 100'000'000;
  sample->add_option("--lambda", s_lambda, "step weight in (0, 1/2)");
  sample->add_option("--n", s_n, "area threshold is N^2");
  sample->add_option("--count", s_count, "number of paths");
  sample->add_flag("--conditioned", s_conditioned, "condition on area >= N^2 by rejection");
  sample->add_option("--max-attempts", s_budget, "rejection budget per draw");
  sample->add_option("--seed", seed);
  sample->add_option("--out", out, "output file (stdout when omitted)");

  auto* mcmc = app.add_subcommand("mcmc", "run one chain and record statistics");
  ChainTask task;
  std::string checkpoint;
  std::string resume;
  std::string path_out;
  mcmc->add_option("--lambda", task.lambda);
  mcmc->add_option("--n", task.n);
  mcmc->add_option("--burn-in", task.burn_in);
  mcmc->add_option("--samples", task.samples);
  mcmc->add_option("--thin", task.thin);
  mcmc->add_option("--chain", task.chain);
  mcmc->add_option("--interior-fraction", task.moves.interior_fraction);
  mcmc->add_option("--indel-fraction", task.moves.indel_fraction);
  mcmc->add_option("--gibbs-per-sweep", task.moves.gibbs_per_sweep);
  mcmc->add_option("--window-c", task.moves.window_c);
  mcmc->add_option("--checkpoint", checkpoint, "write a checkpoint here at the end");
  mcmc->add_option("--resume", resume, "continue from a checkpoint");
  mcmc->add_option("--save-path", path_out, "write the final path encoding here");
  mcmc->add_option("--seed", seed);
  mcmc->add_option("--out", out);

  auto* enumerate = app.add_subcommand("enumerate", "exact conditioned law by enumeration");
  double e_lambda = 0.3;
  std::int64_t e_n = 1;
  std::size_t e_trunc = 12;
  bool e_paths = false;
  enumerate->add_option("--lambda", e_lambda);
  enumerate->add_option("--n", e_n);
  enumerate->add_option("--truncation", e_trunc, "maximal path length (at most 26)");
  enumerate->add_flag("--paths", e_paths, "emit per-path probabilities instead of (length, area) marginals");
  enumerate->add_option("--out", out);

  auto* events = app.add_subcommand("events", "sector event catalogue on stored paths");
  std::string ev_in;
  std::int64_t ev_n = 0;
  SectorOptions ev_opts;
  events->add_option("--paths", ev_in, "file of path encodings or records with a path field")->required();
  events->add_option("--n", ev_n, "N of the sector grid")->required();
  events->add_option("--chi", ev_opts.chi);
  events->add_option("--eta", ev_opts.eta);
  events->add_option("--epsilon", ev_opts.epsilon);
  events->add_option("--epsilon1", ev_opts.epsilon1);
  events->add_option("--k1", ev_opts.k1);
  events->add_option("--k2", ev_opts.k2);
  events->add_option("--out", out);

  auto* experiment = app.add_subcommand("experiment", "N-grid scaling experiment");
  std::string config_file;
  bool seed_given = false;
  experiment->add_option("--config", config_file)->required();
  experiment->add_option("--seed", seed)->each([&](const std::string&) { seed_given = true; });
  experiment->add_option("--out", out, "output directory (overrides the config)");

  auto* fit = app.add_subcommand("fit", "log-log exponent fit of an (N, mean, se) table");
  std::string table_file;
  std::size_t bootstrap = 2000;
  fit->add_option("--table", table_file)->required();
  fit->add_option("--bootstrap", bootstrap);
  fit->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*sample) {
      const ModelParams params(s_lambda, s_n);
      RngStream rng(seed, 0);
      std::string text;
      for (std::uint64_t i = 0; i < s_count; ++i) {
        nlohmann::ordered_json j;
        if (s_conditioned) {
          const auto d = sample_conditioned_rejection(params, rng, s_budget);
          j["path"] = d.path.encode();
          j["attempts"] = d.attempts;
          j["area"] = d.path.area();
        } else {
          const auto p = sample_free(params, rng);
          j["path"] = p.encode();
          j["area"] = p.area();
        }
        text += j.dump() + "\n";
      }
      emit(out, text);
    } else if (*mcmc) {
      task.seed = seed;
      const ModelParams params(task.lambda, task.n);
      ChainState state = resume.empty()
                             ? init_chain(params, RngStream(seed, chain_stream(task.n, task.chain)))
                             : load_checkpoint(resume);
      RunOptions o = task.moves;
      o.sweeps = task.burn_in;
      run(state, o);
      o.sweeps = std::max<std::uint64_t>(1, task.thin);
      std::string text;
      for (std::uint64_t s = 0; s < task.samples; ++s) {
        run(state, o);
        text += to_json_line(make_record(state.path(), state.params(), seed, task.chain, state.sweep_count())) + "\n";
      }
      emit(out, text);
      if (!checkpoint.empty()) save_checkpoint(checkpoint, state);
      if (!path_out.empty()) write_file_atomic(path_out, state.path().encode() + "\n");
    } else if (*enumerate) {
      const ModelParams params(e_lambda, e_n);
      const auto t = exact_conditional(params, e_trunc);
      std::ostringstream os;
      os << "# lambda=" << e_lambda << " N=" << e_n << " truncation=" << e_trunc << '\n';
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6e", t.neglected_bound);
      os << "# neglected_mass_bound=" << buf << '\n';
      if (e_paths) {
        os << "length,pattern,area,probability\n";
        for (const auto& e : t.entries) {
          std::snprintf(buf, sizeof buf, "%.17g", e.probability);
          os << e.length << ',' << e.pattern << ',' << e.area << ',' << buf << '\n';
        }
      } else {
        os << "length,area,probability\n";
        for (const auto& [k, p] : t.length_area_marginal()) {
          std::snprintf(buf, sizeof buf, "%.17g", p);
          os << k.first << ',' << k.second << ',' << buf << '\n';
        }
      }
      emit(out, os.str());
    } else if (*events) {
      const auto grid = build_sector_grid(ev_n, ev_opts.chi, ev_opts.epsilon1);
      std::string text;
      std::size_t idx = 0;
      for (const auto& p : read_paths(ev_in)) {
        for (const auto& r : sector_events(p, grid, ev_opts)) {
          nlohmann::ordered_json j;
          j["path"] = idx;
          j["j"] = r.j;
          j["acted"] = r.acted;
          j["success"] = r.success;
          j["gac"] = r.gac;
          j["log_gac"] = r.log_gac;
          j["log_sid"] = r.log_sid;
          j["favourable"] = r.favourable;
          j["mbt"] = r.mbt;
          text += j.dump() + "\n";
        }
        ++idx;
      }
      emit(out, text);
    } else if (*experiment) {
      auto cfg = load_config(config_file);
      if (seed_given) cfg.seed = seed;
      if (!out.empty()) cfg.output_dir = out;
      const auto r = estimate(cfg);
      std::cout << summary_json(cfg, r);
    } else if (*fit) {
      const auto f = fit_exponent(read_fit_table(table_file), bootstrap, seed);
      nlohmann::ordered_json j{{"slope", f.slope},   {"intercept", f.intercept}, {"slope_se", f.slope_se},
                               {"ci_lo", f.ci_lo},   {"ci_hi", f.ci_hi},         {"r2", f.r2}};
      std::cout << j.dump(2) << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "facetlab: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "facetlab: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
