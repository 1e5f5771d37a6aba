#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "facetlab/path.hpp"

namespace facetlab {

/// One observation of a chain, serialised as a single JSON line.
struct ChainRecord {
  std::int64_t n = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t chain = 0;
  std::uint64_t sweep = 0;
  double mean_fl = 0.0;
  double mean_lr = 0.0;
  double max_fl = 0.0;
  double max_lr = 0.0;
  double mlrf = 0.0;
  std::int64_t excess_area = 0;
  std::int64_t length = 0;
  bool ray_missed = false;
  std::optional<double> cone_area;

  friend bool operator==(const ChainRecord&, const ChainRecord&) = default;
};

ChainRecord make_record(const LatticePath& path, const ModelParams& params, std::uint64_t seed,
                        std::uint64_t chain, std::uint64_t sweep);

std::string to_json_line(const ChainRecord& r);
ChainRecord parse_record(std::string_view line);

/// Names accepted by statistic_value.
const std::vector<std::string>& statistic_names();
/// Value of a named statistic; UnknownStatistic otherwise.
double statistic_value(const ChainRecord& r, std::string_view name);
/// Exponent p of the natural scale N^p of a statistic.
double statistic_scale_exponent(std::string_view name);

/// Writes `text` to `file` through a temporary and a rename.
void write_file_atomic(const std::string& file, const std::string& text);
std::string read_file(const std::string& file);

}  // namespace facetlab
