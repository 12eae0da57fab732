#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stguide {

enum class ErrorCode {
  kInvalidArgument,
  kNonPositiveDepth,
  kBehindCamera,
  kDimensionMismatch,
  kOutOfBounds,
  kTooFewPoints,
  kAllDepthInvalid,
  kRankDeficient,
  kZeroLength,
  kInvalidAnchor,
  kEmptyOccupancy,
  kHoleCoversImage,
  kAllBehindCamera,
  kStageStalled,
  kSchemaViolation,
  kUnknownVariation,
  kIo,
  kEmptySet,
  kLengthMismatch,
  kNonPositiveGroundTruth,
  kEmptyGroup,
  kNoScorer,
  kUnknownEntity,
  kNoGuidance,
  kConfig,
  kProtocol,
};

std::string_view error_name(ErrorCode code);

// Library-wide exception. `stage` names the pipeline stage that raised it
// when the error escaped a multi-stage operation (empty otherwise).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string stage = {})
      : std::runtime_error(message), code_(code), stage_(std::move(stage)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  ErrorCode code_;
  std::string stage_;
};

}  // namespace stguide
