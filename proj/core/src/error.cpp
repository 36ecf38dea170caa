#include "explorer/error.hpp"

namespace explorer {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateTrace: return "degenerate trace";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kProjection: return "projection error";
    case ErrorCode::kOutOfBounds: return "out of bounds";
    case ErrorCode::kSamplingExhausted: return "sampling exhausted";
    case ErrorCode::kInvalidRegion: return "invalid region";
    case ErrorCode::kEmptyData: return "empty data";
    case ErrorCode::kUnderdeterminedFit: return "underdetermined fit";
    case ErrorCode::kData: return "data error";
    case ErrorCode::kInsufficientData: return "insufficient data";
    case ErrorCode::kIntegration: return "integration error";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kConfig: return "configuration error";
    case ErrorCode::kIo: return "I/O error";
    case ErrorCode::kNumerical: return "numerical failure";
  }
  return "unknown error";
}

}  // namespace explorer
