#include "facetlab/path.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "facetlab/errors.hpp"

namespace facetlab {

namespace {

constexpr std::uint64_t bit_of(std::size_t i) { return 1ULL << (63 - (i & 63)); }

// Mask of bit positions holding step offsets >= off inside a word.
constexpr std::uint64_t tail_mask(std::size_t off) {
  return off == 0 ? ~0ULL : ((1ULL << (64 - off)) - 1);
}

}  // namespace

ModelParams::ModelParams(double lambda, std::int64_t n_target)
    : lambda_(lambda), n_target_(n_target) {
  if (!(lambda > 0.0 && lambda < 0.5)) {
    throw Error(ErrorCode::InvalidParams, "lambda must lie in (0, 1/2)");
  }
  if (n_target < 1) throw Error(ErrorCode::InvalidParams, "N must be >= 1");
}

// ---------------------------------------------------------------- StepSequence

StepSequence::StepSequence(std::string_view letters) {
  words_.reserve(letters.size() / 64 + 1);
  for (char c : letters) {
    if (c == 'R') {
      push_back(Step::Right);
    } else if (c == 'D') {
      push_back(Step::Down);
    } else {
      throw Error(ErrorCode::InvalidPath, std::string("unexpected step letter '") + c + "'");
    }
  }
}

StepSequence::StepSequence(std::size_t count, Step fill) {
  words_.assign((count + 63) / 64, fill == Step::Down ? ~0ULL : 0ULL);
  size_ = count;
  if (fill == Step::Down && (count & 63) != 0) {
    words_.back() &= ~tail_mask(count & 63);
  }
}

void StepSequence::push_back(Step s) {
  if ((size_ & 63) == 0) words_.push_back(0);
  if (s == Step::Down) words_[size_ >> 6] |= bit_of(size_);
  ++size_;
}

void StepSequence::set(std::size_t i, Step s) {
  if (s == Step::Down) {
    words_[i >> 6] |= bit_of(i);
  } else {
    words_[i >> 6] &= ~bit_of(i);
  }
}

void StepSequence::insert(std::size_t pos, Step s) {
  if ((size_ & 63) == 0) words_.push_back(0);
  const std::size_t w = pos >> 6;
  const std::size_t off = pos & 63;
  const std::uint64_t low = tail_mask(off);
  std::uint64_t old = words_[w];
  std::uint64_t carry = old & 1U;
  words_[w] = (old & ~low) | ((old & low) >> 1) | (s == Step::Down ? bit_of(off) : 0);
  for (std::size_t k = w + 1; k < words_.size(); ++k) {
    old = words_[k];
    words_[k] = (old >> 1) | (carry << 63);
    carry = old & 1U;
  }
  ++size_;
}

void StepSequence::erase(std::size_t pos) {
  const std::size_t w = pos >> 6;
  const std::size_t off = pos & 63;
  const std::uint64_t low = tail_mask(off);
  const std::size_t nw = words_.size();
  std::uint64_t next_msb = (w + 1 < nw) ? (words_[w + 1] >> 63) : 0;
  std::uint64_t old = words_[w];
  words_[w] = (old & ~low) | ((old << 1) & low) | next_msb;
  for (std::size_t k = w + 1; k < nw; ++k) {
    next_msb = (k + 1 < nw) ? (words_[k + 1] >> 63) : 0;
    words_[k] = (words_[k] << 1) | next_msb;
  }
  --size_;
  if ((size_ & 63) == 0) {
    words_.pop_back();
  } else {
    words_.back() &= ~tail_mask(size_ & 63);
  }
}

void StepSequence::toggle_pair(std::size_t i) {
  words_[i >> 6] ^= bit_of(i);
  words_[(i + 1) >> 6] ^= bit_of(i + 1);
}

std::size_t StepSequence::count_down(std::size_t begin, std::size_t end) const {
  if (begin >= end) return 0;
  std::size_t wb = begin >> 6;
  const std::size_t we = (end - 1) >> 6;
  std::size_t total = 0;
  if (wb == we) {
    std::uint64_t m = tail_mask(begin & 63);
    const std::size_t eoff = ((end - 1) & 63) + 1;
    if (eoff < 64) m &= ~tail_mask(eoff);
    return static_cast<std::size_t>(std::popcount(words_[wb] & m));
  }
  total += std::popcount(words_[wb] & tail_mask(begin & 63));
  for (std::size_t k = wb + 1; k < we; ++k) total += std::popcount(words_[k]);
  std::uint64_t m = ~0ULL;
  const std::size_t eoff = ((end - 1) & 63) + 1;
  if (eoff < 64) m = ~tail_mask(eoff);
  total += std::popcount(words_[we] & m);
  return total;
}

StepSequence StepSequence::slice(std::size_t begin, std::size_t end) const {
  StepSequence out;
  out.words_.reserve((end - begin) / 64 + 1);
  for (std::size_t i = begin; i < end; ++i) out.push_back((*this)[i]);
  return out;
}

std::int64_t StepSequence::inversions() const {
  std::int64_t downs_after = static_cast<std::int64_t>(count_down());
  std::int64_t inv = 0;
  for (std::size_t i = 0; i < size_; ++i) {
    if (is_down(i)) {
      --downs_after;
    } else {
      inv += downs_after;
    }
  }
  return inv;
}

std::string StepSequence::to_string() const {
  std::string s(size_, 'R');
  for (std::size_t i = 0; i < size_; ++i) {
    if (is_down(i)) s[i] = 'D';
  }
  return s;
}

// ----------------------------------------------------------------- LatticePath

LatticePath::LatticePath(std::int64_t start_height, StepSequence steps)
    : steps_(std::move(steps)), start_height_(start_height) {
  const auto downs = static_cast<std::int64_t>(steps_.count_down());
  if (start_height < 0 || downs != start_height) {
    throw Error(ErrorCode::InvalidPath, "number of Down steps must equal the start height");
  }
  end_x_ = static_cast<std::int64_t>(steps_.size()) - downs;
  std::int64_t h = start_height_;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (steps_.is_down(i)) {
      --h;
    } else {
      area_ += h;
    }
  }
}

LatticePath LatticePath::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::InvalidPath, "expected k:STEPS encoding");
  }
  std::int64_t k = 0;
  const auto head = text.substr(0, colon);
  auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), k);
  if (ec != std::errc() || ptr != head.data() + head.size()) {
    throw Error(ErrorCode::InvalidPath, "bad start height in path encoding");
  }
  return LatticePath(k, StepSequence(text.substr(colon + 1)));
}

LatticePath LatticePath::square(std::int64_t side) {
  StepSequence s(static_cast<std::size_t>(side), Step::Right);
  for (std::int64_t i = 0; i < side; ++i) s.push_back(Step::Down);
  return LatticePath(side, std::move(s));
}

std::string LatticePath::encode() const {
  return std::to_string(start_height_) + ":" + steps_.to_string();
}

std::int64_t LatticePath::recompute_area() const {
  // Closed polygon (0,0) -> (0,k) -> vertices ... -> (end_x,0) -> (0,0).
  std::int64_t twice = 0;
  Point prev{0, 0};
  auto edge = [&](Point next) {
    twice += prev.x * next.y - next.x * prev.y;
    prev = next;
  };
  Point cur{0, start_height_};
  edge(cur);
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (steps_.is_down(i)) {
      --cur.y;
    } else {
      ++cur.x;
    }
    edge(cur);
  }
  edge(Point{0, 0});
  return std::abs(twice) / 2;
}

Point LatticePath::vertex(std::size_t i) const {
  const auto d = static_cast<std::int64_t>(steps_.count_down(0, i));
  return Point{static_cast<std::int64_t>(i) - d, start_height_ - d};
}

std::vector<Point> LatticePath::vertices() const {
  std::vector<Point> out;
  out.reserve(steps_.size() + 1);
  Point cur{0, start_height_};
  out.push_back(cur);
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (steps_.is_down(i)) {
      --cur.y;
    } else {
      ++cur.x;
    }
    out.push_back(cur);
  }
  return out;
}

std::optional<std::size_t> LatticePath::index_of(Point p) const {
  const std::int64_t i = p.x + (start_height_ - p.y);
  if (p.x < 0 || p.y < 0 || i < 0 || i > static_cast<std::int64_t>(steps_.size())) {
    return std::nullopt;
  }
  const auto idx = static_cast<std::size_t>(i);
  if (vertex(idx) != p) return std::nullopt;
  return idx;
}

std::vector<Point> LatticePath::vertex_set() const {
  auto v = vertices();
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

int LatticePath::flip_corner_in_place(std::size_t v) {
  const int delta = corner_delta(v);
  if (delta != 0) {
    steps_.toggle_pair(v - 1);
    area_ += delta;
  }
  return delta;
}

std::int64_t LatticePath::insertion_gain(std::size_t slot, Step s) const {
  const auto d_before = static_cast<std::int64_t>(steps_.count_down(0, slot));
  if (s == Step::Down) return static_cast<std::int64_t>(slot) - d_before;
  return start_height_ - d_before;
}

std::int64_t LatticePath::erasure_loss(std::size_t pos) const {
  const auto d_before = static_cast<std::int64_t>(steps_.count_down(0, pos));
  if (steps_.is_down(pos)) return -(static_cast<std::int64_t>(pos) - d_before);
  return -(start_height_ - d_before);
}

std::int64_t LatticePath::insert_step(std::size_t slot, Step s) {
  const std::int64_t gain = insertion_gain(slot, s);
  steps_.insert(slot, s);
  if (s == Step::Down) {
    ++start_height_;
  } else {
    ++end_x_;
  }
  area_ += gain;
  return gain;
}

std::int64_t LatticePath::erase_step(std::size_t pos) {
  const std::int64_t delta = erasure_loss(pos);
  const bool down = steps_.is_down(pos);
  steps_.erase(pos);
  if (down) {
    --start_height_;
  } else {
    --end_x_;
  }
  area_ += delta;
  return delta;
}

void LatticePath::replace_segment(std::size_t begin, const StepSequence& segment) {
  const std::size_t end = begin + segment.size();
  const std::int64_t old_inv = steps_.slice(begin, end).inversions();
  if (steps_.count_down(begin, end) != segment.count_down()) {
    throw Error(ErrorCode::BridgeEndpointsInvalid, "replacement changes the bridge endpoints");
  }
  for (std::size_t i = 0; i < segment.size(); ++i) steps_.set(begin + i, segment[i]);
  area_ += segment.inversions() - old_inv;
}

// ---------------------------------------------------------------------- Bridge

bool bridge_space_nonempty(Point a, Point b) { return a.x <= b.x && a.y >= b.y; }

Bridge::Bridge(Point a, Point b, StepSequence steps) : a_(a), b_(b), steps_(std::move(steps)) {
  if (!bridge_space_nonempty(a, b)) {
    throw Error(ErrorCode::BridgeEndpointsInvalid, "no down-right path between the endpoints");
  }
  const auto downs = static_cast<std::int64_t>(steps_.count_down());
  const auto rights = static_cast<std::int64_t>(steps_.size()) - downs;
  if (rights != b.x - a.x || downs != a.y - b.y) {
    throw Error(ErrorCode::BridgeEndpointsInvalid, "step counts do not match the endpoints");
  }
}

Bridge Bridge::lowest(Point a, Point b) {
  if (!bridge_space_nonempty(a, b)) {
    throw Error(ErrorCode::EmptyBridgeSpace, "no down-right path between the endpoints");
  }
  StepSequence s(static_cast<std::size_t>(a.y - b.y), Step::Down);
  for (std::int64_t i = 0; i < b.x - a.x; ++i) s.push_back(Step::Right);
  return Bridge(a, b, std::move(s));
}

Bridge Bridge::highest(Point a, Point b) {
  if (!bridge_space_nonempty(a, b)) {
    throw Error(ErrorCode::EmptyBridgeSpace, "no down-right path between the endpoints");
  }
  StepSequence s(static_cast<std::size_t>(b.x - a.x), Step::Right);
  for (std::int64_t i = 0; i < a.y - b.y; ++i) s.push_back(Step::Down);
  return Bridge(a, b, std::move(s));
}

std::vector<Point> Bridge::vertices() const {
  std::vector<Point> out;
  out.reserve(steps_.size() + 1);
  Point cur = a_;
  out.push_back(cur);
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (steps_.is_down(i)) {
      --cur.y;
    } else {
      ++cur.x;
    }
    out.push_back(cur);
  }
  return out;
}

std::vector<std::int64_t> Bridge::column_heights() const {
  std::vector<std::int64_t> h;
  h.reserve(static_cast<std::size_t>(b_.x - a_.x));
  std::int64_t y = a_.y;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (steps_.is_down(i)) {
      --y;
    } else {
      h.push_back(y);
    }
  }
  return h;
}

// ------------------------------------------------------------------ operations

std::int64_t area(const LatticePath& path) { return path.area(); }

std::int64_t excess_area(const LatticePath& path, const ModelParams& params) {
  return path.area() - params.area_threshold();
}

Bridge restrict_to_bridge(const LatticePath& path, Point a, Point b) {
  const auto ia = path.index_of(a);
  const auto ib = path.index_of(b);
  if (!ia || !ib) throw Error(ErrorCode::PointNotOnPath, "bridge endpoint is not a path vertex");
  if (*ia > *ib) throw Error(ErrorCode::InvalidParams, "bridge start must precede its end");
  return Bridge(a, b, path.steps().slice(*ia, *ib));
}

bool dominates(const Bridge& p, const Bridge& q) {
  if (p.a() != q.a() || p.b() != q.b()) {
    throw Error(ErrorCode::EndpointMismatch, "bridges do not share endpoints");
  }
  const auto hp = p.column_heights();
  const auto hq = q.column_heights();
  for (std::size_t c = 0; c < hp.size(); ++c) {
    if (hp[c] < hq[c]) return false;
  }
  return true;
}

std::optional<FlipResult> corner_flip(const LatticePath& path, std::size_t i) {
  if (i < 1 || i >= path.length()) {
    throw Error(ErrorCode::IndexOutOfRange, "corner flip needs an interior vertex");
  }
  if (path.corner_delta(i) == 0) return std::nullopt;
  LatticePath out = path;
  const int delta = out.flip_corner_in_place(i);
  return FlipResult{std::move(out), delta};
}

LatticePath surg(const LatticePath& path, std::span<const std::size_t> horizontal_indices) {
  std::vector<std::size_t> h(horizontal_indices.begin(), horizontal_indices.end());
  std::sort(h.begin(), h.end());
  h.erase(std::unique(h.begin(), h.end()), h.end());
  const auto& steps = path.steps();
  for (std::size_t idx : h) {
    if (idx >= steps.size() || steps.is_down(idx)) {
      throw Error(ErrorCode::NotAHorizontalStep, "surgery index is not a Right step");
    }
  }
  StepSequence out;
  std::size_t next = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (next < h.size() && h[next] == i) {
      out.push_back(Step::Down);
      ++next;
    }
    out.push_back(steps[i]);
  }
  return LatticePath(path.start_height() + static_cast<std::int64_t>(h.size()), std::move(out));
}

}  // namespace facetlab
