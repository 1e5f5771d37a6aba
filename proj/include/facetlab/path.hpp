#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace facetlab {

enum class Step : std::uint8_t { Right = 0, Down = 1 };

struct Point {
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend constexpr auto operator<=>(const Point&, const Point&) = default;
};

/// Model parameters (lambda, N). The area threshold is N^2.
class ModelParams {
 public:
  ModelParams(double lambda, std::int64_t n_target);

  double lambda() const { return lambda_; }
  std::int64_t n_target() const { return n_target_; }
  std::int64_t area_threshold() const { return n_target_ * n_target_; }
  /// Normalising constant of the free measure, 1 / (1 - 2 lambda).
  double partition() const { return 1.0 / (1.0 - 2.0 * lambda_); }

 private:
  double lambda_;
  std::int64_t n_target_;
};

/// Bit-packed step sequence, most-significant bit first; a set bit is a Down step.
/// Bits past size() are kept zero.
class StepSequence {
 public:
  StepSequence() = default;
  explicit StepSequence(std::string_view letters);
  StepSequence(std::size_t count, Step fill);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool is_down(std::size_t i) const {
    return (words_[i >> 6] >> (63 - (i & 63))) & 1U;
  }
  Step operator[](std::size_t i) const { return is_down(i) ? Step::Down : Step::Right; }

  void push_back(Step s);
  void set(std::size_t i, Step s);
  void insert(std::size_t pos, Step s);
  void erase(std::size_t pos);
  /// Toggles steps i and i + 1.
  void toggle_pair(std::size_t i);

  /// Number of Down steps with index in [begin, end).
  std::size_t count_down(std::size_t begin, std::size_t end) const;
  std::size_t count_down() const { return count_down(0, size_); }

  /// Sub-sequence [begin, end).
  StepSequence slice(std::size_t begin, std::size_t end) const;
  /// Number of (Right, Down) pairs with the Right step first.
  std::int64_t inversions() const;

  std::string to_string() const;
  std::span<const std::uint64_t> words() const { return words_; }

  friend bool operator==(const StepSequence&, const StepSequence&) = default;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

/// A down-right lattice path from (0, start_height) to (end_x, 0).
///
/// The area is cached as the column sum of heights and kept current by the
/// in-place edit methods. `recompute_area` is an independent shoelace audit.
class LatticePath {
 public:
  /// Degenerate path at the origin.
  LatticePath() = default;
  LatticePath(std::int64_t start_height, StepSequence steps);

  /// Parses the canonical `k:SSSS` encoding.
  static LatticePath parse(std::string_view text);
  /// Side-by-side square path R^side D^side from (0, side).
  static LatticePath square(std::int64_t side);

  std::string encode() const;

  std::int64_t start_height() const { return start_height_; }
  std::int64_t end_x() const { return end_x_; }
  std::size_t length() const { return steps_.size(); }
  std::int64_t area() const { return area_; }
  const StepSequence& steps() const { return steps_; }

  /// Shoelace area of (0,0) -> (0,k) -> ... -> (end_x,0) -> (0,0).
  std::int64_t recompute_area() const;

  /// Vertex after i steps, 0 <= i <= length().
  Point vertex(std::size_t i) const;
  std::vector<Point> vertices() const;
  /// Index of the vertex equal to p, if p is on the path.
  std::optional<std::size_t> index_of(Point p) const;
  /// The path as an (unordered) set of lattice points, sorted.
  std::vector<Point> vertex_set() const;

  // In-place edits. Each returns the area change and keeps the cache exact.

  /// Swaps steps (v-1, v) when they differ; returns -1 for RD->DR, +1 for
  /// DR->RD and 0 (no change) when collinear. Requires 1 <= v < length().
  int flip_corner_in_place(std::size_t v);
  /// Area change that flip_corner_in_place(v) would produce.
  int corner_delta(std::size_t v) const {
    const bool d0 = steps_.is_down(v - 1);
    const bool d1 = steps_.is_down(v);
    return d0 == d1 ? 0 : (d1 ? -1 : 1);
  }
  std::int64_t insert_step(std::size_t slot, Step s);
  std::int64_t erase_step(std::size_t pos);
  /// Area change of insert_step(slot, s) without applying it.
  std::int64_t insertion_gain(std::size_t slot, Step s) const;
  /// Area change of erase_step(pos) without applying it.
  std::int64_t erasure_loss(std::size_t pos) const;
  /// Replaces steps [begin, end) by `segment` of identical composition.
  void replace_segment(std::size_t begin, const StepSequence& segment);

  friend bool operator==(const LatticePath& a, const LatticePath& b) {
    return a.start_height_ == b.start_height_ && a.steps_ == b.steps_;
  }

 private:
  StepSequence steps_;
  std::int64_t start_height_ = 0;
  std::int64_t end_x_ = 0;
  std::int64_t area_ = 0;
};

/// A down-right path between two fixed lattice points.
class Bridge {
 public:
  Bridge() = default;
  Bridge(Point a, Point b, StepSequence steps);

  /// Bridge hugging the lower-left corner (all Down steps first).
  static Bridge lowest(Point a, Point b);
  /// Bridge hugging the upper-right corner (all Right steps first).
  static Bridge highest(Point a, Point b);

  Point a() const { return a_; }
  Point b() const { return b_; }
  const StepSequence& steps() const { return steps_; }
  StepSequence& mutable_steps() { return steps_; }
  std::size_t length() const { return steps_.size(); }
  std::vector<Point> vertices() const;
  /// Height of each Right step, left to right.
  std::vector<std::int64_t> column_heights() const;
  /// Number of (Right, Down) step pairs; area contribution of the bridge
  /// relative to its lowest arrangement.
  std::int64_t inversions() const { return steps_.inversions(); }

  friend bool operator==(const Bridge&, const Bridge&) = default;

 private:
  Point a_;
  Point b_;
  StepSequence steps_;
};

/// True when the bridge space a -> b is non-empty.
bool bridge_space_nonempty(Point a, Point b);

std::int64_t area(const LatticePath& path);
/// A(path) - N^2; negative when the path is outside the conditioned support.
std::int64_t excess_area(const LatticePath& path, const ModelParams& params);

/// The sub-bridge of `path` between its vertices a and b (a visited first).
Bridge restrict_to_bridge(const LatticePath& path, Point a, Point b);

/// Partial order on bridges sharing endpoints: p >= q column by column.
bool dominates(const Bridge& p, const Bridge& q);

struct FlipResult {
  LatticePath path;
  int area_delta;
};
/// Corner flip at vertex i; nullopt when the two incident steps are collinear.
std::optional<FlipResult> corner_flip(const LatticePath& path, std::size_t i);

/// Inserts a Down step before each listed Right step (indices into path.steps()).
LatticePath surg(const LatticePath& path, std::span<const std::size_t> horizontal_indices);

}  // namespace facetlab
