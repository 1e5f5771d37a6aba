#pragma once

#include <stdexcept>
#include <string>

namespace facetlab {

enum class ErrorCode {
  InvalidParams,
  InvalidPath,
  PointNotOnPath,
  EndpointMismatch,
  IndexOutOfRange,
  NotAHorizontalStep,
  RayMissesMajorant,
  EmptyBridgeSpace,
  AcceptanceBudgetExceeded,
  BudgetExceeded,
  BridgeEndpointsInvalid,
  EmptyIntersection,
  DegenerateChord,
  NotConnected,
  EmptySector,
  EmptyImage,
  InsufficientData,
  NonPositiveMean,
  UnknownStatistic,
  ConfigError,
  IoError,
  AuditFailure,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace facetlab
