#include "facetlab/rng.hpp"

#include "facetlab/errors.hpp"

namespace facetlab {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter)
    : seed_(seed), stream_id_(stream_id), counter_(counter) {
  key_lo_ = mix64(seed + kGolden);
  key_hi_ = mix64(stream_id ^ mix64(key_lo_ + 0xD1B54A32D192ED03ULL));
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t c = counter_++;
  return mix64(mix64(c * kGolden ^ key_lo_) + key_hi_);
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::uniform_open() {
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidParams, "uniform_below(0)");
  // Lemire's nearly-divisionless method.
  std::uint64_t x = next_u64();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = -n % n;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

bool RngStream::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform() < p;
}

RngStream RngStream::child(std::uint64_t index) const {
  return RngStream(mix64(seed_ ^ key_hi_) + index, mix64(stream_id_ + kGolden * (index + 1)));
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidPath: return "InvalidPath";
    case ErrorCode::PointNotOnPath: return "PointNotOnPath";
    case ErrorCode::EndpointMismatch: return "EndpointMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NotAHorizontalStep: return "NotAHorizontalStep";
    case ErrorCode::RayMissesMajorant: return "RayMissesMajorant";
    case ErrorCode::EmptyBridgeSpace: return "EmptyBridgeSpace";
    case ErrorCode::AcceptanceBudgetExceeded: return "AcceptanceBudgetExceeded";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::BridgeEndpointsInvalid: return "BridgeEndpointsInvalid";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::DegenerateChord: return "DegenerateChord";
    case ErrorCode::NotConnected: return "NotConnected";
    case ErrorCode::EmptySector: return "EmptySector";
    case ErrorCode::EmptyImage: return "EmptyImage";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NonPositiveMean: return "NonPositiveMean";
    case ErrorCode::UnknownStatistic: return "UnknownStatistic";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::AuditFailure: return "AuditFailure";
  }
  return "Unknown";
}

}  // namespace facetlab
