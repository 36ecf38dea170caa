#pragma once

#include <stdexcept>
#include <string>

namespace explorer {

enum class ErrorCode {
  kDegenerateTrace,
  kDimensionMismatch,
  kProjection,
  kOutOfBounds,
  kSamplingExhausted,
  kInvalidRegion,
  kEmptyData,
  kUnderdeterminedFit,
  kData,
  kInsufficientData,
  kIntegration,
  kParse,
  kConfig,
  kIo,
  kNumerical,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace explorer
