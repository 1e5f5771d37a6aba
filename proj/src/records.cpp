#include "facetlab/records.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "facetlab/errors.hpp"
#include "facetlab/majorant.hpp"
#include "facetlab/sectors.hpp"
#include "json.hpp"

namespace facetlab {

ChainRecord make_record(const LatticePath& path, const ModelParams& params, std::uint64_t seed,
                        std::uint64_t chain, std::uint64_t sweep) {
  const auto s = roughness_stats(path);
  ChainRecord r;
  r.n = params.n_target();
  r.lambda = params.lambda();
  r.seed = seed;
  r.chain = chain;
  r.sweep = sweep;
  r.mean_fl = s.mean_fl;
  r.mean_lr = s.mean_lr;
  r.max_fl = s.max_fl;
  r.max_lr = s.max_lr;
  r.mlrf = s.mlrf;
  r.ray_missed = s.ray_missed;
  r.excess_area = excess_area(path, params);
  r.length = static_cast<std::int64_t>(path.length());
  r.cone_area = cone_area_statistic(path, params.n_target());
  return r;
}

std::string to_json_line(const ChainRecord& r) {
  nlohmann::ordered_json j;
  j["N"] = r.n;
  j["lambda"] = r.lambda;
  j["seed"] = r.seed;
  j["chain"] = r.chain;
  j["sweep"] = r.sweep;
  j["mean_fl"] = r.mean_fl;
  j["mean_lr"] = r.mean_lr;
  j["max_fl"] = r.max_fl;
  j["max_lr"] = r.max_lr;
  j["mlrf"] = r.mlrf;
  j["excess_area"] = r.excess_area;
  j["length"] = r.length;
  j["ray_missed"] = r.ray_missed;
  if (r.cone_area) {
    j["cone_area"] = *r.cone_area;
  } else {
    j["cone_area"] = nullptr;
  }
  return j.dump();
}

ChainRecord parse_record(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    ChainRecord r;
    r.n = j.at("N").get<std::int64_t>();
    r.lambda = j.at("lambda").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.chain = j.value("chain", std::uint64_t{0});
    r.sweep = j.value("sweep", std::uint64_t{0});
    r.mean_fl = j.at("mean_fl").get<double>();
    r.mean_lr = j.at("mean_lr").get<double>();
    r.max_fl = j.at("max_fl").get<double>();
    r.max_lr = j.at("max_lr").get<double>();
    r.mlrf = j.at("mlrf").get<double>();
    r.excess_area = j.at("excess_area").get<std::int64_t>();
    r.length = j.at("length").get<std::int64_t>();
    r.ray_missed = j.value("ray_missed", false);
    if (j.contains("cone_area") && !j["cone_area"].is_null()) r.cone_area = j["cone_area"].get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("bad record: ") + e.what());
  }
}

const std::vector<std::string>& statistic_names() {
  static const std::vector<std::string> names{"mean_fl", "mean_lr", "max_fl",  "max_lr",
                                              "mlrf",    "excess_area", "length", "cone_area"};
  return names;
}

double statistic_value(const ChainRecord& r, std::string_view name) {
  if (name == "mean_fl") return r.mean_fl;
  if (name == "mean_lr") return r.mean_lr;
  if (name == "max_fl") return r.max_fl;
  if (name == "max_lr") return r.max_lr;
  if (name == "mlrf") return r.mlrf;
  if (name == "excess_area") return static_cast<double>(r.excess_area);
  if (name == "length") return static_cast<double>(r.length);
  if (name == "cone_area") return r.cone_area.value_or(0.0);
  throw Error(ErrorCode::UnknownStatistic, std::string(name));
}

double statistic_scale_exponent(std::string_view name) {
  if (name == "mean_fl" || name == "max_fl" || name == "mlrf") return 2.0 / 3.0;
  if (name == "mean_lr" || name == "max_lr") return 1.0 / 3.0;
  if (name == "excess_area" || name == "length" || name == "cone_area") return 1.0;
  throw Error(ErrorCode::UnknownStatistic, std::string(name));
}

void write_file_atomic(const std::string& file, const std::string& text) {
  const std::filesystem::path target(file);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = file + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + tmp);
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp);
  }
  if (std::rename(tmp.c_str(), file.c_str()) != 0) throw Error(ErrorCode::IoError, "cannot rename to " + file);
}

std::string read_file(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + file);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace facetlab
