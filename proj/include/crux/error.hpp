#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crux {

enum class ErrorCode {
  kBackendUnavailable,
  kMalformedResponse,
  kEmptyAnswer,
  kConfigInvalid,
  kTemplateMissingPlaceholder,
  kZeroTotal,
  kInvalidDistribution,
  kMatrixInvalid,
  kOutOfRange,
  kZeroDegreeRow,
  kMissingInput,
  kDimensionMismatch,
  kDegenerateLabels,
  kEmptyData,
  kSingleClass,
  kFileUnreadable,
  kSchemaMismatch,
  kCacheCorrupt,
  kMissingFusionParams,
};

std::string_view error_code_name(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above so
// callers (and the CLI exit path) can branch on the kind rather than the text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace crux
